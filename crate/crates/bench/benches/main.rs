//! Criterion benchmarks for the hot numerical kernels: root finding,
//! Jacobi elliptic evaluation, QRT stepping and curve fitting.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use mdeq_core::catalog::{associated_curve, exact_solution, EquationId, Params};
use mdeq_core::elliptic::jacobi_sn_cn_dn;
use mdeq_core::numkit::{poly_roots, Cx, Extended, Polynomial};
use mdeq_core::qrt::{fit_biquadratic, qrt_step_symmetric};

fn params_kappa2() -> Params {
    let mut p = Params::new();
    p.insert("kappa".into(), Cx::new(2.0, 0.0));
    p
}

fn bench_poly_roots(c: &mut Criterion) {
    // The E19 septic 8δ⁷ + 8δ⁵ − (δ+1)⁴.
    let septic = Polynomial::new(
        [-1.0, -4.0, -6.0, -4.0, -1.0, 8.0, 0.0, 8.0]
            .iter()
            .map(|&x| Cx::new(x, 0.0))
            .collect(),
    );
    c.bench_function("poly_roots_septic", |b| {
        b.iter(|| poly_roots(black_box(&septic)).unwrap())
    });
}

fn bench_jacobi(c: &mut Criterion) {
    let k = Cx::new(0.5, 0.0);
    let u = Cx::new(0.73, 0.41);
    c.bench_function("jacobi_sn_cn_dn", |b| {
        b.iter(|| jacobi_sn_cn_dn(black_box(u), black_box(k)).unwrap())
    });
}

fn bench_qrt_step(c: &mut Criterion) {
    let curve = associated_curve(EquationId::E12, &params_kappa2()).unwrap().0;
    let w0 = Cx::new(3.0, 0.0);
    let w1 = Cx::new((5.0_f64 / 8.0).sqrt(), 0.0);
    c.bench_function("qrt_step_symmetric_chain_100", |b| {
        b.iter(|| {
            let (mut prev, mut cur) = (w0, w1);
            for _ in 0..100 {
                let next = qrt_step_symmetric(black_box(&curve), prev, cur).unwrap();
                prev = cur;
                cur = next;
            }
            cur
        })
    });
}

fn bench_fit(c: &mut Criterion) {
    let params = params_kappa2();
    let phases = [
        Cx::new(0.1, 0.0),
        Cx::new(0.35, 0.2),
        Cx::new(0.7, -0.15),
        Cx::new(1.1, 0.4),
        Cx::new(1.7, -0.3),
    ];
    let mut pairs = Vec::new();
    for phase in phases {
        let sampler = exact_solution(EquationId::E12, &params, phase).unwrap();
        for z in 0..12 {
            if let (Extended::Finite(a), Extended::Finite(b)) = (sampler(z), sampler(z + 1)) {
                pairs.push((a, b));
            }
        }
    }
    c.bench_function("fit_biquadratic_60_pairs", |b| {
        b.iter(|| fit_biquadratic(black_box(&pairs)).unwrap())
    });
}

criterion_group!(benches, bench_poly_roots, bench_jacobi, bench_qrt_step, bench_fit);
criterion_main!(benches);

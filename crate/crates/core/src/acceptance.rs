//! End-to-end verification suite: one runner per acceptance criterion,
//! shared by the test harness and the `verify` CLI command.
//!
//! Every tolerance is pinned here, in code. Criterion 6 is knowingly red:
//! the discrete Riccati scheme w̄ = (w + εÃ)/(1 − εw) is a symmetric
//! one-step map (M(ε)·M(−ε) ∝ I), hence second-order accurate, so its
//! fitted convergence order sits near 2.0 and cannot fall in the required
//! band [0.85, 1.15]. The criterion is evaluated as stated and reported
//! honestly rather than loosened.

use crate::catalog::{
    associated_curve, catalog_get, constraint_residual, exact_solution, solve_constraints,
    EquationId, Params,
};
use crate::continuum::{qrt_limit_study, riccati_limit_study, rk_reference_order};
use crate::elliptic::{jacobi_sn_cn_dn, sn_addition, sn_maclaurin5, AdditionBranch};
use crate::numkit::{Cx, Extended};
use crate::orbit::{h_substitution_chain, iterate, orbit_residual, BranchPolicy};
use crate::qrt::{
    fit_biquadratic, parametrize_symmetric, qrt_invariant, qrt_step_general, qrt_step_symmetric,
    symmetric_params_from, Biquadratic, QRTPencil,
};
use crate::riccati::{canonicalization_defect, canonicalize_riccati, RiccatiCoefficients};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl CriterionReport {
    /// The one-line pass/fail form printed by `verify` and the test suite.
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} [{}] {} — {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.details
        )
    }
}

fn cxr(re: f64) -> Cx {
    Cx::new(re, 0.0)
}

fn eta23() -> Cx {
    Cx::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)
}

fn params_of(pairs: &[(&str, Cx)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Criterion 1: 50-step nearest-prediction orbits of every catalog equation
/// E9–E19 (admissible parameters) satisfy the defining relation with
/// relative residual < 1e−8 away from flagged singularities.
pub fn criterion_1_catalog_residuals() -> CriterionReport {
    let fail = |details: String| CriterionReport {
        id: 1,
        name: "catalog residuals",
        passed: false,
        details,
    };
    let f0 = Cx::new(0.37, 0.21);
    let mut cases: Vec<(EquationId, Params)> = vec![
        (EquationId::E9, Params::new()),
        (EquationId::E10, params_of(&[("delta", cxr(0.3))])),
        (EquationId::E11, Params::new()),
        (EquationId::E12, params_of(&[("kappa", cxr(2.0))])),
        (EquationId::E13, Params::new()),
        (EquationId::E14, params_of(&[("eta", eta23())])),
        (EquationId::E15, Params::new()),
        (EquationId::E16, Params::new()),
        (EquationId::E18, Params::new()),
    ];
    for id in [EquationId::E17, EquationId::E19] {
        match solve_constraints(id) {
            Ok(sols) => cases.extend(sols.into_iter().map(|p| (id, p))),
            Err(e) => return fail(format!("constraint solver failed for {id}: {e}")),
        }
    }
    let mut worst = 0.0_f64;
    let mut worst_id = String::new();
    let mut count = 0;
    for (id, params) in &cases {
        let eq = match catalog_get(*id, params) {
            Ok(eq) => eq,
            Err(e) => return fail(format!("{id}: {e}")),
        };
        let orb = match iterate(&eq, f0, 50, &BranchPolicy::NearestPrediction) {
            Ok(o) => o,
            Err(e) => return fail(format!("{id}: iteration failed: {e}")),
        };
        if orb.len() != 51 {
            return fail(format!("{id}: orbit terminated after {} samples", orb.len()));
        }
        let res = orbit_residual(&eq, &orb);
        if res > worst {
            worst = res;
            worst_id = id.to_string();
        }
        count += 1;
    }
    CriterionReport {
        id: 1,
        name: "catalog residuals",
        passed: worst < 1e-8,
        details: format!("{count} orbit runs; worst residual {worst:.2e} ({worst_id}); bound 1e-8"),
    }
}

/// Criterion 2: invariant conservation — 100 symmetric steps on the E12
/// curve and 100 general-pencil steps on 5 seeded bounded cases, both with
/// drift < 1e−8.
pub fn criterion_2_invariant_conservation() -> CriterionReport {
    let (curve, _) = associated_curve(EquationId::E12, &params_of(&[("kappa", cxr(2.0))])).unwrap();
    let zero = cxr(0.0);
    let one = cxr(1.0);
    let unit = [[zero, zero, zero], [zero, zero, zero], [zero, zero, one]];
    let pencil = QRTPencil::new(*curve.matrix(), unit).unwrap();
    let mut prev = cxr(3.0);
    let mut cur = cxr((5.0_f64 / 8.0).sqrt());
    let k0 = qrt_invariant(&pencil, prev, cur).unwrap();
    let mut sym_drift = 0.0_f64;
    for _ in 0..100 {
        let next = match qrt_step_symmetric(&curve, prev, cur) {
            Ok(n) => n,
            Err(e) => {
                return CriterionReport {
                    id: 2,
                    name: "QRT invariant conservation",
                    passed: false,
                    details: format!("symmetric step failed: {e}"),
                }
            }
        };
        if let Ok(k) = qrt_invariant(&pencil, cur, next) {
            sym_drift = sym_drift.max((k - k0).norm() / (1.0 + k0.norm()));
        }
        prev = cur;
        cur = next;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut accepted = 0;
    let mut gen_drift = 0.0_f64;
    let mut attempts = 0;
    'seed: while accepted < 5 && attempts < 500 {
        attempts += 1;
        let c =
            |rng: &mut ChaCha8Rng| Cx::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0);
        let mat = |rng: &mut ChaCha8Rng| {
            let (a, b, g, e, z, m) = (c(rng), c(rng), c(rng), c(rng), c(rng), c(rng));
            [[a, b, g], [b, e, z], [g, z, m]]
        };
        let c0 = mat(&mut rng);
        let c1 = mat(&mut rng);
        let Ok(pencil) = QRTPencil::new(c0, c1) else {
            continue;
        };
        let (mut x, mut y) = (c(&mut rng) * 0.5, c(&mut rng) * 0.5);
        let Ok(k0) = qrt_invariant(&pencil, x, y) else {
            continue;
        };
        let mut drift = 0.0_f64;
        for _ in 0..100 {
            match qrt_step_general(&pencil, x, y) {
                Ok((xn, yn)) => {
                    x = xn;
                    y = yn;
                }
                Err(_) => continue 'seed,
            }
            if x.norm() > 5.0 || y.norm() > 5.0 {
                continue 'seed;
            }
            let Ok(k) = qrt_invariant(&pencil, x, y) else {
                continue 'seed;
            };
            drift = drift.max((k - k0).norm() / (1.0 + k0.norm()));
        }
        gen_drift = gen_drift.max(drift);
        accepted += 1;
    }
    let passed = sym_drift < 1e-8 && gen_drift < 1e-8 && accepted == 5;
    CriterionReport {
        id: 2,
        name: "QRT invariant conservation",
        passed,
        details: format!(
            "symmetric drift {sym_drift:.2e}; general drift {gen_drift:.2e} over {accepted} bounded pencils; bound 1e-8"
        ),
    }
}

/// Criterion 3: parametrization round trip at (k, ε) = (0.5, 0.3) and the
/// 50-step exact sn-orbit residual on the canonical form.
pub fn criterion_3_parametrization_round_trip() -> CriterionReport {
    let fail = |details: String| CriterionReport {
        id: 3,
        name: "parametrization round trip",
        passed: false,
        details,
    };
    let (k, eps, c0) = (cxr(0.5), cxr(0.3), cxr(0.1));
    let params = match symmetric_params_from(k, eps) {
        Ok(p) => p,
        Err(e) => return fail(format!("forward map failed: {e}")),
    };
    let (k2, eps2) = match parametrize_symmetric(&params) {
        Ok(v) => v,
        Err(e) => return fail(format!("recovery failed: {e}")),
    };
    let k_ok = (k2 - k).norm() < 1e-9 || (k2 - cxr(1.0) / k).norm() < 1e-9;
    let (s, _, _) = jacobi_sn_cn_dn(eps, k).unwrap();
    let (s2, _, _) = jacobi_sn_cn_dn(eps2, k2).unwrap();
    let sn2_err = (s * s - s2 * s2).norm();

    let orbit = crate::qrt::exact_symmetric_orbit(k, eps, c0, 50).unwrap();
    let curve = Biquadratic::canonical_symmetric(params.a, params.b).unwrap();
    let mut orbit_res = 0.0_f64;
    for m in 0..49 {
        let (x, y) = (
            orbit.values[m + 1].as_finite().unwrap(),
            orbit.values[m].as_finite().unwrap(),
        );
        orbit_res = orbit_res.max(curve.eval(x, y).norm());
    }
    let passed = k_ok && sn2_err < 1e-9 && orbit_res < 1e-8;
    CriterionReport {
        id: 3,
        name: "parametrization round trip",
        passed,
        details: format!(
            "k' in {{k, 1/k}}: {k_ok}; |sn²ε' − sn²ε| = {sn2_err:.2e} (bound 1e-9); orbit residual {orbit_res:.2e} (bound 1e-8)"
        ),
    }
}

/// Criterion 4: elliptic identities on the test grid, the Maclaurin
/// remainder scaling band, and the addition formula on 50 random triples.
pub fn criterion_4_elliptic_identities() -> CriterionReport {
    let moduli = [cxr(0.0), cxr(0.2), cxr(0.5), cxr(0.8), Cx::new(0.3, 0.1)];
    let one = cxr(1.0);
    let mut id_worst = 0.0_f64;
    for k in moduli {
        for i in 0..20 {
            for j in 0..20 {
                let u = Cx::new(-1.0 + 2.0 * i as f64 / 19.0, -1.0 + 2.0 * j as f64 / 19.0);
                let (s, c, d) = match jacobi_sn_cn_dn(u, k) {
                    Ok(v) => v,
                    Err(e) => {
                        return CriterionReport {
                            id: 4,
                            name: "elliptic identities",
                            passed: false,
                            details: format!("evaluation failed at u={u}, k={k}: {e}"),
                        }
                    }
                };
                id_worst = id_worst.max((s * s + c * c - one).norm());
                id_worst = id_worst.max((d * d + k * k * s * s - one).norm());
            }
        }
    }

    let k = cxr(0.3);
    let rem = |e: f64| {
        let (s, _, _) = jacobi_sn_cn_dn(cxr(e), k).unwrap();
        (s - sn_maclaurin5(cxr(e), k)).norm()
    };
    let ratio = rem(0.5) / rem(0.25);
    let ratio_ok = (44.8..=166.4).contains(&ratio);

    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let addition_moduli = [cxr(0.2), cxr(0.5), cxr(0.6), cxr(0.8), Cx::new(0.3, 0.1)];
    let mut add_worst = 0.0_f64;
    let mut checked = 0;
    while checked < 50 {
        let u = Cx::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0);
        let e = Cx::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let k = addition_moduli[checked % addition_moduli.len()];
        let Ok(via_formula) = sn_addition(u, e, k, AdditionBranch::Plus) else {
            continue; // inadmissible triple (denominator too small)
        };
        let (direct, _, _) = jacobi_sn_cn_dn(u + e, k).unwrap();
        add_worst = add_worst.max((via_formula - direct).norm());
        checked += 1;
    }

    let passed = id_worst < 1e-10 && ratio_ok && add_worst < 1e-9;
    CriterionReport {
        id: 4,
        name: "elliptic identities",
        passed,
        details: format!(
            "grid identity defect {id_worst:.2e} (bound 1e-10); remainder ratio {ratio:.1} in [44.8, 166.4]: {ratio_ok}; addition defect {add_worst:.2e} (bound 1e-9)"
        ),
    }
}

/// Criterion 5: the autonomous A-formula agrees with an independent Möbius
/// conjugation on 100 random admissible coefficient triples, and
/// b = (2, 1, 1) gives A = −5/9.
pub fn criterion_5_riccati_correspondence() -> CriterionReport {
    let b = RiccatiCoefficients::new(cxr(2.0), cxr(1.0), cxr(1.0)).unwrap();
    let (a, t) = canonicalize_riccati(&b).unwrap();
    let pin_ok = (a - cxr(-5.0 / 9.0)).norm() < 1e-12;
    let pin_defect = canonicalization_defect(&b, a, &t).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < 100 {
        let mut c = || Cx::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0);
        let Ok(b) = RiccatiCoefficients::new(c(), c(), c()) else {
            continue;
        };
        if (b.b1 + b.b3).norm() < 1e-3 {
            continue; // outside the admissible region b1 ≠ −b3
        }
        let Ok((a, t)) = canonicalize_riccati(&b) else {
            continue;
        };
        worst = worst.max(canonicalization_defect(&b, a, &t).unwrap());
        done += 1;
    }
    let passed = pin_ok && pin_defect < 1e-10 && worst < 1e-10;
    CriterionReport {
        id: 5,
        name: "Riccati correspondence",
        passed,
        details: format!(
            "b=(2,1,1): A = -5/9 {pin_ok}, defect {pin_defect:.2e}; worst conjugation defect over 100 triples {worst:.2e} (bound 1e-10)"
        ),
    }
}

/// Criterion 6: continuum limits. The Riccati study must show fitted order
/// in [0.85, 1.15] for Ã ∈ {1, i, 1+i} (measured: ≈ 2.0, see module docs),
/// the Ã = 0 scheme must be exact below 1e−12, the scaled QRT relation
/// residual must stay below 1e−8 at ε ∈ {0.3, 0.2, 0.1}, and the RK4
/// reference must fit order in [3.7, 4.3] against sn.
pub fn criterion_6_continuum_limits() -> CriterionReport {
    let eps: Vec<f64> = (4..=10).map(|k| 2.0_f64.powi(-k)).collect();
    let mut orders = Vec::new();
    for a in [cxr(1.0), Cx::new(0.0, 1.0), Cx::new(1.0, 1.0)] {
        match riccati_limit_study(a, cxr(0.0), 0.8, &eps) {
            Ok(study) => orders.push(study.fitted_order),
            Err(e) => {
                return CriterionReport {
                    id: 6,
                    name: "continuum limits",
                    passed: false,
                    details: format!("Riccati study failed: {e}"),
                }
            }
        }
    }
    let order_ok = orders.iter().all(|o| (0.85..=1.15).contains(o));

    let exact = riccati_limit_study(cxr(0.0), cxr(1.0), 0.5, &eps).unwrap();
    let exact_worst = exact.errors.iter().cloned().fold(0.0_f64, f64::max);
    let exact_ok = exact_worst < 1e-12;

    let qrt = qrt_limit_study(cxr(0.5), &[0.3, 0.2, 0.1], 1.0, cxr(0.1)).unwrap();
    let rel_worst = qrt
        .relation_residuals
        .iter()
        .cloned()
        .fold(0.0_f64, f64::max);
    let rel_ok = rel_worst < 1e-8;

    let rk = rk_reference_order(cxr(0.5), cxr(0.1), 2.0, &[0.1, 0.05, 0.025, 0.0125]).unwrap();
    let rk_ok = (3.7..=4.3).contains(&rk);

    CriterionReport {
        id: 6,
        name: "continuum limits",
        passed: order_ok && exact_ok && rel_ok && rk_ok,
        details: format!(
            "Riccati fitted orders {:?} required [0.85, 1.15] (measured second-order scheme): {order_ok}; \
             exact-scheme worst error {exact_worst:.2e} < 1e-12: {exact_ok}; \
             QRT relation residual {rel_worst:.2e} < 1e-8: {rel_ok}; RK order {rk:.2} in [3.7, 4.3]: {rk_ok}",
            orders
                .iter()
                .map(|o| (o * 100.0).round() / 100.0)
                .collect::<Vec<_>>()
        ),
    }
}

/// Criterion 7: constraint solvers for E17 (both θ branches) and E19
/// (six deflated roots with exclusions filtered).
pub fn criterion_7_constraint_solvers() -> CriterionReport {
    let e17 = solve_constraints(EquationId::E17).unwrap();
    let s = 8.0_f64.sqrt();
    let minus: Vec<Cx> = e17
        .iter()
        .filter(|p| (p["theta"] - cxr(-1.0)).norm() < 1e-12)
        .map(|p| p["kappa1"])
        .collect();
    let minus_ok = minus.len() == 2
        && minus.iter().any(|k| (k - cxr(s)).norm() < 1e-10)
        && minus.iter().any(|k| (k + cxr(s)).norm() < 1e-10);
    let plus: Vec<Cx> = e17
        .iter()
        .filter(|p| (p["theta"] - cxr(1.0)).norm() < 1e-12)
        .map(|p| p["kappa1"])
        .collect();
    let target = [
        Cx::new(2.0, 2.0 * 3.0_f64.sqrt()),
        Cx::new(2.0, -2.0 * 3.0_f64.sqrt()),
    ];
    let plus_ok = plus.len() == 4
        && plus
            .iter()
            .all(|k| target.iter().any(|t| (k * k - t).norm() < 1e-10));
    let e17_res = e17
        .iter()
        .map(|p| constraint_residual(EquationId::E17, p))
        .fold(0.0_f64, f64::max);

    let e19 = solve_constraints(EquationId::E19).unwrap();
    let e19_res = e19
        .iter()
        .map(|p| constraint_residual(EquationId::E19, p))
        .fold(0.0_f64, f64::max);
    let excluded = [
        cxr(0.0),
        cxr(1.0),
        cxr(-1.0),
        Cx::new(0.0, 1.0),
        Cx::new(0.0, -1.0),
    ];
    let e19_ok = e19.len() == 6
        && e19
            .iter()
            .all(|p| excluded.iter().all(|b| (p["delta"] - b).norm() > 1e-6));

    let passed = minus_ok && plus_ok && e17_res < 1e-12 && e19_ok && e19_res < 1e-10;
    CriterionReport {
        id: 7,
        name: "constraint solvers",
        passed,
        details: format!(
            "E17 θ=-1 gives ±2√2: {minus_ok}; θ=+1 gives κ₁²=2±2i√3: {plus_ok}; E17 residual {e17_res:.2e} (bound 1e-12); \
             E19 six filtered roots: {e19_ok}, residual {e19_res:.2e} (bound 1e-10)"
        ),
    }
}

/// Criterion 8: the h/H substitution chain over a 30-step E14 orbit lands
/// on the biquadratic x²y² − (x² + y²) − η² with residual < 1e−8.
pub fn criterion_8_h_substitution_chain() -> CriterionReport {
    let eta = eta23();
    let eq = catalog_get(EquationId::E14, &params_of(&[("eta", eta)])).unwrap();
    let orb = match iterate(&eq, Cx::new(0.4, 0.3), 30, &BranchPolicy::NearestPrediction) {
        Ok(o) => o,
        Err(e) => {
            return CriterionReport {
                id: 8,
                name: "H-substitution chain",
                passed: false,
                details: format!("orbit failed: {e}"),
            }
        }
    };
    match h_substitution_chain(&orb, eta) {
        Ok(chain) => CriterionReport {
            id: 8,
            name: "H-substitution chain",
            passed: chain.curve_residual < 1e-8,
            details: format!(
                "30-step curve residual {:.2e} (bound 1e-8)",
                chain.curve_residual
            ),
        },
        Err(e) => CriterionReport {
            id: 8,
            name: "H-substitution chain",
            passed: false,
            details: format!("chain failed: {e}"),
        },
    }
}

/// Criterion 9: invariant fitting recovers the E12 and E9 curves from orbit
/// data with cosine distance < 1e−8 and uniqueness gap > 1e−6. Lattice
/// orbits of both equations are 4-periodic up to sign, so the pairs are
/// pooled across several seeded orbits to reach a full-rank design.
pub fn criterion_9_invariant_fitting() -> CriterionReport {
    let fail = |details: String| CriterionReport {
        id: 9,
        name: "invariant fitting",
        passed: false,
        details,
    };
    let params = params_of(&[("kappa", cxr(2.0))]);
    let phases = [
        cxr(0.1),
        Cx::new(0.35, 0.2),
        Cx::new(0.7, -0.15),
        Cx::new(1.1, 0.4),
        Cx::new(1.7, -0.3),
    ];
    let mut e12_pairs = Vec::new();
    for phase in phases {
        let sampler = exact_solution(EquationId::E12, &params, phase).unwrap();
        for z in 0..12 {
            if let (Extended::Finite(a), Extended::Finite(b)) = (sampler(z), sampler(z + 1)) {
                e12_pairs.push((a, b));
            }
        }
    }
    let e12_curve = associated_curve(EquationId::E12, &params).unwrap().0;
    let (e12_dist, e12_gap) = match fit_biquadratic(&e12_pairs) {
        Ok(f) => (f.curve.cosine_distance(&e12_curve), f.gap),
        Err(e) => return fail(format!("E12 fit failed: {e}")),
    };

    let e9 = catalog_get(EquationId::E9, &Params::new()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let mut e9_pairs = Vec::new();
    for _ in 0..6 {
        let f0 = Cx::new(rng.gen::<f64>() * 1.6 - 0.8, rng.gen::<f64>() * 1.6 - 0.8);
        let Ok(orb) = iterate(&e9, f0, 12, &BranchPolicy::NearestPrediction) else {
            continue;
        };
        for m in 0..orb.len() - 1 {
            if let (Extended::Finite(a), Extended::Finite(b)) = (orb.values[m], orb.values[m + 1]) {
                e9_pairs.push((a, b));
            }
        }
    }
    let (e9_dist, e9_gap) = match fit_biquadratic(&e9_pairs) {
        Ok(f) => (f.curve.cosine_distance(&Biquadratic::circle()), f.gap),
        Err(e) => return fail(format!("E9 fit failed: {e}")),
    };

    let passed = e12_dist < 1e-8 && e12_gap > 1e-6 && e9_dist < 1e-8 && e9_gap > 1e-6;
    CriterionReport {
        id: 9,
        name: "invariant fitting",
        passed,
        details: format!(
            "E12 cosine distance {e12_dist:.2e}, gap {e12_gap:.2e}; E9 cosine distance {e9_dist:.2e}, gap {e9_gap:.2e}; bounds 1e-8 / 1e-6"
        ),
    }
}

/// Run criteria 1–9 (criterion 10 measures the `verify` binary itself and
/// lives with the CLI).
pub fn run_all() -> Vec<CriterionReport> {
    vec![
        criterion_1_catalog_residuals(),
        criterion_2_invariant_conservation(),
        criterion_3_parametrization_round_trip(),
        criterion_4_elliptic_identities(),
        criterion_5_riccati_correspondence(),
        criterion_6_continuum_limits(),
        criterion_7_constraint_solvers(),
        criterion_8_h_substitution_chain(),
        criterion_9_invariant_fitting(),
    ]
}

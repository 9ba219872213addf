//! Simultaneous root finding by the Aberth–Ehrlich iteration.

use super::{Cx, Polynomial, ROOT_TOL};
use crate::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MAX_ITER: usize = 200;

/// All roots (with multiplicity) of `p`, sorted by (real part, imaginary
/// part).
///
/// Initial guesses sit on a radius-bounded ring with a seeded random
/// perturbation, so the result is deterministic across runs. Convergence is
/// accepted once every residual satisfies `|p(r)| <= ROOT_TOL * scale(p)`;
/// otherwise no partial result is returned.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<Cx>> {
    if p.is_zero() || p.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let n = p.degree();
    let monic = p.monic();
    let deriv = monic.derivative();

    // Cauchy-style bound on root magnitudes for the initial ring radius.
    let radius = 1.0
        + monic.coeffs()[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(0x6d64_6571);
    let mut zs: Vec<Cx> = (0..n)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / n as f64
                + 0.05 * rng.gen::<f64>();
            let r = radius * (0.8 + 0.2 * rng.gen::<f64>());
            Cx::new(r * theta.cos(), r * theta.sin())
        })
        .collect();

    // Converge on the monic form, against the evaluation-noise scale
    // Σ|c_j||z|^j at each point (an absolute tolerance is unreachable for
    // roots of large magnitude).
    let eval_scale = |z: Cx| -> f64 {
        let r = z.norm();
        let mut acc = 1.0;
        let mut rp = 1.0;
        for c in monic.coeffs() {
            acc += c.norm() * rp;
            rp *= r;
        }
        acc
    };
    for _ in 0..MAX_ITER {
        let mut converged = true;
        let mut next = zs.clone();
        for i in 0..n {
            let pv = monic.eval(zs[i]);
            if pv.norm() > ROOT_TOL * eval_scale(zs[i]) {
                converged = false;
            }
            let dv = deriv.eval(zs[i]);
            let newton = if dv.norm() == 0.0 {
                // Stalled derivative: nudge off the critical point.
                Cx::new(1e-8, 1e-8)
            } else {
                pv / dv
            };
            let mut repulsion = Cx::new(0.0, 0.0);
            for (j, &zj) in zs.iter().enumerate() {
                if j != i {
                    let d = zs[i] - zj;
                    if d.norm() > 1e-300 {
                        repulsion += Cx::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = Cx::new(1.0, 0.0) - newton * repulsion;
            let w = if denom.norm() < 1e-300 {
                newton
            } else {
                newton / denom
            };
            next[i] = zs[i] - w;
        }
        zs = next;
        if converged {
            let mut roots = zs;
            roots.sort_by(|a, b| {
                a.re.partial_cmp(&b.re)
                    .unwrap()
                    .then(a.im.partial_cmp(&b.im).unwrap())
            });
            return Ok(roots);
        }
    }
    Err(Error::RootsNotConverged(MAX_ITER))
}

/// Synthetic division of `p` by (z - root); the remainder is discarded.
pub fn deflate(p: &Polynomial, root: Cx) -> Polynomial {
    let n = p.degree();
    if n == 0 {
        return Polynomial::zero();
    }
    let c = p.coeffs();
    let mut out = vec![Cx::new(0.0, 0.0); n];
    let mut acc = c[n];
    for i in (0..n).rev() {
        out[i] = acc;
        acc = c[i] + acc * root;
    }
    Polynomial::new(out)
}

//! Jacobi elliptic functions sn, cn, dn and the complete elliptic integral
//! K(k), for complex argument and modulus.
//!
//! Throughout this module `k` is the *modulus* (not the parameter m = k²):
//! sn(·, k) satisfies sn² + cn² = 1 and dn² + k²·sn² = 1.
//!
//! Evaluation uses the descending Landen transformation
//! `k_{i+1} = (1 − k'_i)/(1 + k'_i)` with principal square-root branches,
//! descending until |k_i| < 1e−10, trigonometric closed forms at the bottom
//! and the Gauss ascending recurrence back up. When the sequence fails to
//! contract within the level budget the evaluation refuses with
//! [`Error::ModulusOutsideCertifiedRegion`] instead of degrading silently.

use crate::numkit::Cx;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Landen descent stops once |k| is below this.
const LANDEN_FLOOR: f64 = 1e-10;
/// Maximum number of Landen levels before refusing.
const LANDEN_MAX_LEVELS: usize = 64;
/// Maximum AGM iterations for K(k).
const AGM_MAX_ITER: usize = 64;

/// Modulus, complementary modulus and quarter period bundled together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticParams {
    pub k: Cx,
    pub kprime: Cx,
    pub big_k: Cx,
}

impl EllipticParams {
    /// Derive k' = √(1 − k²) (principal branch) and K(k) from the modulus.
    pub fn new(k: Cx) -> Result<Self> {
        let kprime = (Cx::new(1.0, 0.0) - k * k).sqrt();
        let big_k = complete_k(k)?;
        Ok(EllipticParams { k, kprime, big_k })
    }
}

/// Complete elliptic integral of the first kind,
/// K(k) = π / (2·AGM(1, k')), principal square roots at each AGM step.
pub fn complete_k(k: Cx) -> Result<Cx> {
    if (k.norm() - 1.0).abs() < 1e-12 {
        return Err(Error::DegenerateModulus);
    }
    let one = Cx::new(1.0, 0.0);
    let mut a = one;
    let mut b = (one - k * k).sqrt();
    for _ in 0..AGM_MAX_ITER {
        if (a - b).norm() <= 1e-15 * a.norm() {
            return Ok(Cx::new(std::f64::consts::PI, 0.0) / (a * 2.0));
        }
        let an = (a + b) / 2.0;
        let bn = (a * b).sqrt();
        a = an;
        b = bn;
    }
    Err(Error::AgmNotConverged)
}

/// The descending Landen modulus ladder from `k` down to |k| < 1e−10.
/// Returns the moduli below the starting level (k₁, k₂, …, k_N).
fn landen_ladder(k: Cx) -> Result<Vec<Cx>> {
    let one = Cx::new(1.0, 0.0);
    let mut ladder = Vec::new();
    let mut ki = k;
    for _ in 0..LANDEN_MAX_LEVELS {
        if ki.norm() < LANDEN_FLOOR {
            return Ok(ladder);
        }
        let kp = (one - ki * ki).sqrt();
        let denom = one + kp;
        if denom.norm() < 1e-14 {
            return Err(Error::ModulusOutsideCertifiedRegion);
        }
        ki = (one - kp) / denom;
        ladder.push(ki);
    }
    Err(Error::ModulusOutsideCertifiedRegion)
}

/// Pull `u` back into the fundamental period cell spanned by 4K and 4iK',
/// the common period lattice of sn, cn and dn. Large arguments would
/// otherwise lose the exponentially small corrections that the Landen
/// ascent amplifies back to O(1).
fn reduce_by_periods(u: Cx, k: Cx) -> Cx {
    let kprime = (Cx::new(1.0, 0.0) - k * k).sqrt();
    let (Ok(big_k), Ok(big_kp)) = (complete_k(k), complete_k(kprime)) else {
        return u;
    };
    let p = big_k * 4.0;
    let q = big_kp * Cx::new(0.0, 4.0);
    let det = p.re * q.im - p.im * q.re;
    if det.abs() < 1e-12 * (p.norm() * q.norm()).max(1e-300) {
        return u;
    }
    let a = ((u.re * q.im - u.im * q.re) / det).round();
    let b = ((p.re * u.im - p.im * u.re) / det).round();
    if a == 0.0 && b == 0.0 {
        return u;
    }
    u - p * a - q * b
}

/// Simultaneous (sn, cn, dn) at argument `u` and modulus `k`.
///
/// Near poles of sn (the iK' lattice) the returned magnitudes grow without
/// bound; callers that sample orbits flag such entries as infinite.
pub fn jacobi_sn_cn_dn(u: Cx, k: Cx) -> Result<(Cx, Cx, Cx)> {
    let one = Cx::new(1.0, 0.0);
    if k.norm() < LANDEN_FLOOR {
        return Ok((u.sin(), u.cos(), one));
    }
    if (k * k - one).norm() < 1e-12 {
        // k² = 1: sn = tanh, cn = dn = sech.
        let sech = one / u.cosh();
        return Ok((u.tanh(), sech, sech));
    }
    let u = reduce_by_periods(u, k);
    let ladder = landen_ladder(k)?;

    let mut arg = u;
    for ki in &ladder {
        arg /= one + ki;
    }
    let (mut s, mut c, mut d) = (arg.sin(), arg.cos(), one);
    // Gauss ascending recurrence; each level consumes the values of the
    // level below it, so the updates share one snapshot of (s, c, d).
    for mu in ladder.iter().rev() {
        let s2 = s * s;
        let denom = one + mu * s2;
        let s_up = (one + mu) * s / denom;
        let c_up = c * d / denom;
        let d_up = (one - mu * s2) / denom;
        s = s_up;
        c = c_up;
        d = d_up;
    }
    Ok((s, c, d))
}

/// Plus/minus branch selector for the sn addition formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdditionBranch {
    Plus,
    Minus,
}

/// sn(u + ε) via the addition formula
/// (cn ε dn ε sn u ± sn ε cn u dn u) / (1 − k² sn²ε sn²u).
pub fn sn_addition(u: Cx, eps: Cx, k: Cx, branch: AdditionBranch) -> Result<Cx> {
    let (su, cu, du) = jacobi_sn_cn_dn(u, k)?;
    let (se, ce, de) = jacobi_sn_cn_dn(eps, k)?;
    let denom = Cx::new(1.0, 0.0) - k * k * se * se * su * su;
    let scale = 1.0 + (k * k * se * se * su * su).norm();
    if denom.norm() <= 1e-12 * scale {
        return Err(Error::AdditionFormulaSingularity);
    }
    let cross = match branch {
        AdditionBranch::Plus => ce * de * su + se * cu * du,
        AdditionBranch::Minus => ce * de * su - se * cu * du,
    };
    Ok(cross / denom)
}

/// Solve sn(u, k) = w by Newton iteration from `guess`; periodicity and the
/// sign of the branch are resolved entirely by the guess.
pub fn sn_inverse(w: Cx, k: Cx, guess: Cx) -> Result<Cx> {
    let mut u = guess;
    for _ in 0..100 {
        let (s, c, d) = jacobi_sn_cn_dn(u, k)?;
        let f = s - w;
        if f.norm() <= 1e-12 * (1.0 + w.norm()) {
            return Ok(u);
        }
        let deriv = c * d;
        if deriv.norm() < 1e-300 {
            return Err(Error::NewtonNotConverged);
        }
        u -= f / deriv;
    }
    Err(Error::NewtonNotConverged)
}

/// Degree-5 Maclaurin section of sn:
/// ε − (1 + k²)ε³/3! + (1 + 14k² + k⁴)ε⁵/5!.
pub fn sn_maclaurin5(eps: Cx, k: Cx) -> Cx {
    let k2 = k * k;
    let one = Cx::new(1.0, 0.0);
    eps - (one + k2) * eps.powu(3) / 6.0 + (one + k2 * 14.0 + k2 * k2) * eps.powu(5) / 120.0
}

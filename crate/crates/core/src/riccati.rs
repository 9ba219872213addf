//! Difference Riccati equations f(z+1) = (b₁f + b₂)/(f + b₃): stepping,
//! canonicalization to f̄ − f = f̄f + A, and the factorizations of the
//! catalog equations E10 and E11 into difference Riccati equations.

use crate::numkit::{mobius_conjugate, Cx, Extended, MobiusMap};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Autonomous coefficients of f(z+1) = (b₁f + b₂)/(f + b₃); the underlying
/// Möbius matrix (b₁, b₂; 1, b₃) must be nondegenerate, i.e. b₂ ≠ b₁b₃.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiccatiCoefficients {
    pub b1: Cx,
    pub b2: Cx,
    pub b3: Cx,
}

impl RiccatiCoefficients {
    pub fn new(b1: Cx, b2: Cx, b3: Cx) -> Result<Self> {
        let det = b1 * b3 - b2;
        if det.norm() <= 1e-12 * (1.0 + (b1 * b3).norm() + b2.norm()) {
            return Err(Error::DegenerateRiccati);
        }
        Ok(RiccatiCoefficients { b1, b2, b3 })
    }

    pub fn as_mobius(&self) -> MobiusMap {
        MobiusMap {
            a: self.b1,
            b: self.b2,
            c: Cx::new(1.0, 0.0),
            d: self.b3,
        }
    }

    /// The canonical map f̄ = (f + A)/(1 − f) written in
    /// (b₁f + b₂)/(f + b₃) form: coefficients (−1, −A, −1). Degenerate only
    /// at A = −1.
    pub fn canonical(a: Cx) -> Result<Self> {
        RiccatiCoefficients::new(Cx::new(-1.0, 0.0), -a, Cx::new(-1.0, 0.0))
    }
}

/// One Riccati step with sphere semantics (total on the Riemann sphere).
pub fn riccati_step(b: &RiccatiCoefficients, f: Extended) -> Extended {
    b.as_mobius().apply(f)
}

/// Canonicalize to f̄ − f = f̄f + A, i.e. the map (1, A; −1, 1).
///
/// In the autonomous case the coefficient reduces to
/// A = −(4b₂ + (b₁ − b₃)²)/(b₁ + b₃)², reached by the substitution
/// f ↦ [−(b₁ + b₃)f + (b₁ − b₃)]/2, which requires b₁ ≠ −b₃.
///
/// Returns (A, T) where T is that substitution; conjugating the b-map by T
/// is projectively (1, A; −1, 1).
pub fn canonicalize_riccati(b: &RiccatiCoefficients) -> Result<(Cx, MobiusMap)> {
    let sum = b.b1 + b.b3;
    if sum.norm() <= 1e-12 * (1.0 + b.b1.norm() + b.b3.norm()) {
        return Err(Error::NonCanonicalizable);
    }
    let diff = b.b1 - b.b3;
    let a = -(b.b2 * 4.0 + diff * diff) / (sum * sum);
    let t = MobiusMap::new(
        -sum / 2.0,
        diff / 2.0,
        Cx::new(0.0, 0.0),
        Cx::new(1.0, 0.0),
    )?;
    Ok((a, t))
}

/// The canonical map (1, A; −1, 1): f̄ = (f + A)/(1 − f).
pub fn canonical_riccati_map(a: Cx) -> MobiusMap {
    MobiusMap {
        a: Cx::new(1.0, 0.0),
        b: a,
        c: Cx::new(-1.0, 0.0),
        d: Cx::new(1.0, 0.0),
    }
}

/// Independent check of [`canonicalize_riccati`]: conjugate the b-map by T
/// and measure the projective distance to (1, A; −1, 1).
pub fn canonicalization_defect(b: &RiccatiCoefficients, a: Cx, t: &MobiusMap) -> Result<f64> {
    let conj = mobius_conjugate(&b.as_mobius(), t)?;
    Ok(conj.projective_distance(&canonical_riccati_map(a)))
}

/// One of the four Riccati factors of equation E10, with the branch data
/// that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Eq10Factor {
    /// Coefficients of the γ-step in (b₁γ + b₂)/(γ + b₃) form.
    pub coeffs: RiccatiCoefficients,
    /// Sign s of the ±i√(1−δ²) branch inside the map.
    pub sign: i32,
    /// Outer exponent θ: −1 means the map is the reciprocal 1/Y of the
    /// θ = +1 map Y with the same sign.
    pub theta: i32,
    /// The principal value of √(1−δ²) used throughout.
    pub sqrt_branch: Cx,
}

/// The lift γ ↦ f = (γ + 1/γ)/2 that sends γ-orbits to E10 solutions.
pub fn eq10_lift(gamma: Cx) -> Extended {
    if gamma.norm() < 1e-300 {
        return Extended::Infinity;
    }
    Extended::Finite((gamma + Cx::new(1.0, 0.0) / gamma) / 2.0)
}

/// Factor E10 into four difference Riccati equations for γ, where
/// f = (γ + 1/γ)/2.
///
/// With r = √(1 − δ²) (principal) the four maps are
/// γ̄ = ±Y_s(γ)^{±1} realized concretely as Y_s and −1/Y_s for s = ±1, with
///
/// ```text
/// Y_s(γ) = ((r + s·iδ)γ − s·i) / (γ − δ + s·i·r).
/// ```
///
/// Each lifted γ-orbit satisfies E10, and the four maps are pairwise
/// projectively distinct (they share no solutions).
pub fn factor_eq10_to_riccati(delta: Cx) -> Result<Vec<Eq10Factor>> {
    let one = Cx::new(1.0, 0.0);
    let i = Cx::new(0.0, 1.0);
    if (delta - one).norm() < 1e-9 || (delta + one).norm() < 1e-9 {
        return Err(Error::InvalidParameter("delta = ±1 is excluded".into()));
    }
    let r = (one - delta * delta).sqrt();
    let mut out = Vec::with_capacity(4);
    for s in [1i32, -1i32] {
        let sf = s as f64;
        // Y_s as a Möbius matrix with the c-entry already normalized to 1.
        let y = MobiusMap {
            a: r + i * delta * sf,
            b: -i * sf,
            c: one,
            d: -delta + i * r * sf,
        };
        let recip = y.reciprocal().normalized();
        // θ = −1: γ̄ = −1/Y_s(γ).
        let neg_recip = MobiusMap {
            a: -recip.a,
            b: -recip.b,
            c: recip.c,
            d: recip.d,
        };
        for (theta, m) in [(1i32, y), (-1i32, neg_recip)] {
            if m.c.norm() < 1e-12 * m.entry_scale() {
                return Err(Error::DegenerateMobius);
            }
            let coeffs =
                RiccatiCoefficients::new(m.a / m.c, m.b / m.c, m.d / m.c)?;
            out.push(Eq10Factor {
                coeffs,
                sign: s,
                theta,
                sqrt_branch: r,
            });
        }
    }
    Ok(out)
}

/// The Riccati factor of equation E11 together with its lift.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Eq11Factor {
    pub coeffs: RiccatiCoefficients,
}

impl Eq11Factor {
    /// f = (8γ² − (γ² + 1)²)/(γ² + 1)²; the lift has a pole at γ² = −1.
    pub fn lift(&self, gamma: Cx) -> Extended {
        let g2 = gamma * gamma;
        let den = (g2 + Cx::new(1.0, 0.0)) * (g2 + Cx::new(1.0, 0.0));
        if den.norm() <= 1e-12 * (1.0 + g2.norm()).powi(2) {
            return Extended::Infinity;
        }
        Extended::Finite((g2 * 8.0 - den) / den)
    }
}

/// The γ-map γ̄ = ((1 + √2)γ − i)/(γ + i(1 + √2)) whose lifted orbits solve
/// E11. Derived by tracing f = (1 − u²)/u², √2·u = (γ + 1/γ)/2 through the
/// equation: both nested square roots collapse to perfect squares, leaving
/// a Möbius map; the numeric lift audit pins the branch signs.
pub fn factor_eq11_to_riccati() -> Eq11Factor {
    let s2 = 2.0_f64.sqrt();
    let coeffs = RiccatiCoefficients::new(
        Cx::new(1.0 + s2, 0.0),
        Cx::new(0.0, -1.0),
        Cx::new(0.0, 1.0 + s2),
    )
    .expect("fixed constants are nondegenerate");
    Eq11Factor { coeffs }
}

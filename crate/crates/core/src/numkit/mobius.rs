//! Möbius transformations as projective 2×2 complex matrices.

use super::{Cx, Extended};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Relative determinant threshold below which a map counts as degenerate.
pub const DET_TOL: f64 = 1e-12;

/// The map z ↦ (az + b)/(cz + d), acting on the Riemann sphere.
///
/// A map is only defined up to a nonzero scalar; [`MobiusMap::normalized`]
/// fixes the representative with largest-magnitude entry equal to 1 so that
/// equality tests are deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: Cx,
    pub b: Cx,
    pub c: Cx,
    pub d: Cx,
}

impl MobiusMap {
    pub fn new(a: Cx, b: Cx, c: Cx, d: Cx) -> Result<Self> {
        let m = MobiusMap { a, b, c, d };
        if m.det().norm() <= DET_TOL * m.entry_scale() * m.entry_scale() {
            return Err(Error::DegenerateMobius);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        MobiusMap {
            a: Cx::new(1.0, 0.0),
            b: Cx::new(0.0, 0.0),
            c: Cx::new(0.0, 0.0),
            d: Cx::new(1.0, 0.0),
        }
    }

    /// z ↦ 1/z.
    pub fn inversion() -> Self {
        MobiusMap {
            a: Cx::new(0.0, 0.0),
            b: Cx::new(1.0, 0.0),
            c: Cx::new(1.0, 0.0),
            d: Cx::new(0.0, 0.0),
        }
    }

    /// z ↦ αz + β.
    pub fn affine(alpha: Cx, beta: Cx) -> Result<Self> {
        MobiusMap::new(alpha, beta, Cx::new(0.0, 0.0), Cx::new(1.0, 0.0))
    }

    pub fn det(&self) -> Cx {
        self.a * self.d - self.b * self.c
    }

    pub(crate) fn entry_scale(&self) -> f64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max)
            .max(1e-300)
    }

    /// Projective inverse (no determinant division).
    pub fn inverse(&self) -> Self {
        MobiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// self ∘ other: first apply `other`, then `self`.
    pub fn compose(&self, other: &MobiusMap) -> Self {
        MobiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// The map z ↦ 1/self(z): inversion composed on the outside.
    pub fn reciprocal(&self) -> Self {
        MobiusMap {
            a: self.c,
            b: self.d,
            c: self.a,
            d: self.b,
        }
    }

    /// Apply with projective handling: z = ∞ ↦ a/c and poles ↦ ∞.
    pub fn apply(&self, z: Extended) -> Extended {
        match z {
            Extended::Infinity => {
                if self.c.norm() <= DET_TOL * self.entry_scale() {
                    Extended::Infinity
                } else {
                    Extended::Finite(self.a / self.c)
                }
            }
            Extended::Finite(z) => {
                let den = self.c * z + self.d;
                let num = self.a * z + self.b;
                let scale = self.entry_scale() * (1.0 + z.norm());
                if den.norm() <= 1e-14 * scale {
                    Extended::Infinity
                } else {
                    Extended::Finite(num / den)
                }
            }
        }
    }

    /// Shorthand for finite arguments.
    pub fn apply_cx(&self, z: Cx) -> Extended {
        self.apply(Extended::Finite(z))
    }

    /// Largest-magnitude entry rescaled to 1 (deterministic representative).
    pub fn normalized(&self) -> Self {
        let entries = [self.a, self.b, self.c, self.d];
        let mut best = 0usize;
        for (i, e) in entries.iter().enumerate() {
            if e.norm() > entries[best].norm() * (1.0 + 1e-15) {
                best = i;
            }
        }
        let s = entries[best];
        MobiusMap {
            a: self.a / s,
            b: self.b / s,
            c: self.c / s,
            d: self.d / s,
        }
    }

    /// Entrywise distance between normalized representatives.
    pub fn projective_distance(&self, other: &MobiusMap) -> f64 {
        let p = self.normalized();
        let q = other.normalized();
        // The normalization anchor may differ between the two maps; align by
        // the relative scalar that matches the largest entry of `p`.
        let entries_p = [p.a, p.b, p.c, p.d];
        let entries_q = [q.a, q.b, q.c, q.d];
        let mut best = 0usize;
        for (i, e) in entries_p.iter().enumerate() {
            if e.norm() > entries_p[best].norm() {
                best = i;
            }
        }
        if entries_q[best].norm() == 0.0 {
            return entries_p
                .iter()
                .zip(entries_q.iter())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
        }
        let s = entries_p[best] / entries_q[best];
        entries_p
            .iter()
            .zip(entries_q.iter())
            .map(|(x, y)| (x - y * s).norm())
            .fold(0.0, f64::max)
    }

    pub fn projectively_eq(&self, other: &MobiusMap, tol: f64) -> bool {
        self.projective_distance(other) <= tol
    }

    /// trace² / det, the basic Möbius conjugation invariant.
    pub fn trace2_over_det(&self) -> Cx {
        let t = self.a + self.d;
        t * t / self.det()
    }
}

/// T⁻¹ ∘ M ∘ T, normalized so the largest-magnitude entry is 1.
pub fn mobius_conjugate(m: &MobiusMap, t: &MobiusMap) -> Result<MobiusMap> {
    if t.det().norm() <= DET_TOL * t.entry_scale() * t.entry_scale() {
        return Err(Error::DegenerateMobius);
    }
    Ok(t.inverse().compose(m).compose(t).normalized())
}

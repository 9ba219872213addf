//! Complex-arithmetic foundation: polynomials, root finding, Möbius maps
//! and rational maps with pole-aware evaluation.
//!
//! All types are immutable after construction and all operations are pure,
//! so everything here is safe to use from multiple threads.

mod mobius;
mod polynomial;
mod rational;
mod roots;

pub use mobius::{mobius_conjugate, MobiusMap};
pub use polynomial::Polynomial;
pub use rational::RationalMap;
pub use roots::{deflate, poly_roots};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The universal numeric carrier: a double-precision complex value.
pub type Cx = Complex64;

/// Relative tolerance used when matching roots numerically.
pub const ROOT_TOL: f64 = 1e-12;

/// Relative tolerance for the numeric polynomial GCD (root matching).
pub const GCD_TOL: f64 = 1e-9;

/// A point on the Riemann sphere: finite complex value or the point at
/// infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Extended {
    Finite(Cx),
    Infinity,
}

impl Extended {
    pub fn finite(re: f64, im: f64) -> Self {
        Extended::Finite(Cx::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    /// The finite value, if any.
    pub fn as_finite(&self) -> Option<Cx> {
        match self {
            Extended::Finite(z) => Some(*z),
            Extended::Infinity => None,
        }
    }

    /// Classify a raw complex result: non-finite components or magnitude
    /// beyond `threshold` count as the point at infinity.
    pub fn from_raw(z: Cx, threshold: f64) -> Self {
        if z.re.is_finite() && z.im.is_finite() && z.norm() <= threshold {
            Extended::Finite(z)
        } else {
            Extended::Infinity
        }
    }
}

impl From<Cx> for Extended {
    fn from(z: Cx) -> Self {
        Extended::Finite(z)
    }
}

/// `1 + max |entry|`, the scale used in relative comparisons.
pub fn scale_of(values: impl IntoIterator<Item = Cx>) -> f64 {
    1.0 + values
        .into_iter()
        .map(|z| z.norm())
        .fold(0.0_f64, f64::max)
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::Cx;

    pub fn cx(re: f64, im: f64) -> Cx {
        Cx::new(re, im)
    }

    pub fn assert_close(a: Cx, b: Cx, tol: f64, msg: &str) {
        let diff = (a - b).norm();
        assert!(diff <= tol, "{msg}: expected {b}, got {a}, diff {diff:.3e}");
    }

    pub fn assert_close_f(a: f64, b: f64, tol: f64, msg: &str) {
        let diff = (a - b).abs();
        assert!(diff <= tol, "{msg}: expected {b}, got {a}, diff {diff:.3e}");
    }
}

//! Dense complex polynomials in one variable, ascending coefficient order.

use super::Cx;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A polynomial with complex coefficients, stored in ascending degree order.
///
/// Trailing coefficients that are negligible relative to the largest one are
/// trimmed at construction, so the leading coefficient of a nonzero
/// polynomial is always meaningfully nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<Cx>,
}

const TRIM_TOL: f64 = 1e-14;

impl Polynomial {
    /// Build from ascending coefficients, trimming a negligible tail.
    pub fn new(coeffs: Vec<Cx>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        Polynomial { coeffs: vec![] }
    }

    pub fn constant(c: Cx) -> Self {
        Polynomial::new(vec![c])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Cx]) -> Self {
        let mut p = Polynomial::constant(Cx::new(1.0, 0.0));
        for &r in roots {
            p = p.mul(&Polynomial::new(vec![-r, Cx::new(1.0, 0.0)]));
        }
        p
    }

    fn trim(&mut self) {
        let max = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);
        if max == 0.0 {
            self.coeffs.clear();
            return;
        }
        while let Some(last) = self.coeffs.last() {
            if last.norm() <= TRIM_TOL * max {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Cx] {
        &self.coeffs
    }

    /// Coefficient of z^i (zero beyond the stored range).
    pub fn coeff(&self, i: usize) -> Cx {
        self.coeffs.get(i).copied().unwrap_or_else(|| Cx::new(0.0, 0.0))
    }

    pub fn leading(&self) -> Cx {
        self.coeffs.last().copied().unwrap_or_else(|| Cx::new(0.0, 0.0))
    }

    /// `1 + max |coefficient|`; the scale for relative residual tests.
    pub fn coeff_scale(&self) -> f64 {
        1.0 + self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Cx) -> Cx {
        let mut acc = Cx::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * (i as f64))
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn scale(&self, s: Cx) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Polynomial::new(coeffs)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(Cx::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Cx::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let inv = Cx::new(1.0, 0.0) / self.leading();
        self.scale(inv)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})·z"),
                _ => format!("({c})·z^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::testutil::*;

    #[test]
    fn eval_and_derivative() {
        // p(z) = 1 + 2z + 3z^2
        let p = Polynomial::new(vec![cx(1.0, 0.0), cx(2.0, 0.0), cx(3.0, 0.0)]);
        assert_close(p.eval(cx(2.0, 0.0)), cx(17.0, 0.0), 1e-14, "p(2)");
        let d = p.derivative();
        assert_eq!(d.degree(), 1);
        assert_close(d.eval(cx(2.0, 0.0)), cx(14.0, 0.0), 1e-14, "p'(2)");
    }

    #[test]
    fn from_roots_round_trip() {
        let roots = [cx(1.0, 0.0), cx(-2.0, 0.5)];
        let p = Polynomial::from_roots(&roots);
        for r in roots {
            assert!(p.eval(r).norm() < 1e-13 * p.coeff_scale());
        }
    }

    #[test]
    fn trim_keeps_leading_nonzero() {
        let p = Polynomial::new(vec![cx(1.0, 0.0), cx(0.0, 0.0), cx(1e-20, 0.0)]);
        assert_eq!(p.degree(), 0);
        assert!(!p.is_zero());
    }

    #[test]
    fn zero_polynomial() {
        let p = Polynomial::new(vec![cx(0.0, 0.0); 3]);
        assert!(p.is_zero());
        assert_eq!(p.eval(cx(5.0, 1.0)), cx(0.0, 0.0));
    }
}

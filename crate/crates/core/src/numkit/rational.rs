//! Rational maps num/den with pole-aware evaluation and Möbius pullback.

use super::{poly_roots, Cx, Extended, MobiusMap, Polynomial, GCD_TOL};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A ratio of two complex polynomials in lowest terms.
///
/// Construction rejects a numerator/denominator pair sharing a root (within
/// [`GCD_TOL`] relative distance); [`RationalMap::pullback`] cancels such
/// common factors numerically before normalizing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalMap {
    num: Polynomial,
    den: Polynomial,
}

impl RationalMap {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.degree() >= 1 && den.degree() >= 1 && !num.is_zero() {
            let rn = poly_roots(&num)?;
            let rd = poly_roots(&den)?;
            let scale = 1.0
                + rn.iter()
                    .chain(rd.iter())
                    .map(|z| z.norm())
                    .fold(0.0_f64, f64::max);
            for a in &rn {
                for b in &rd {
                    if (a - b).norm() <= GCD_TOL * scale {
                        return Err(Error::CommonFactor);
                    }
                }
            }
        }
        Ok(RationalMap { num, den })
    }

    /// The identity map f ↦ f.
    pub fn identity() -> Self {
        RationalMap {
            num: Polynomial::new(vec![Cx::new(0.0, 0.0), Cx::new(1.0, 0.0)]),
            den: Polynomial::constant(Cx::new(1.0, 0.0)),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    /// max(deg num, deg den).
    pub fn degree(&self) -> usize {
        self.num.degree().max(self.den.degree())
    }

    /// num(z)/den(z) on the sphere. A simultaneous near-zero of numerator
    /// and denominator is reported as an error rather than a value.
    pub fn eval(&self, z: Cx) -> Result<Extended> {
        let nv = self.num.eval(z);
        let dv = self.den.eval(z);
        let zscale = (1.0 + z.norm()).powi(self.degree() as i32);
        let dtiny = dv.norm() <= 1e-13 * self.den.coeff_scale() * zscale;
        let ntiny = nv.norm() <= 1e-13 * self.num.coeff_scale() * zscale;
        if dtiny && ntiny {
            return Err(Error::CommonRootEvaluation);
        }
        if dtiny {
            return Ok(Extended::Infinity);
        }
        Ok(Extended::Finite(nv / dv))
    }

    /// The value at z = ∞: ratio of leading coefficients when degrees match,
    /// 0 when the denominator dominates, ∞ otherwise.
    pub fn eval_at_infinity(&self) -> Extended {
        use std::cmp::Ordering::*;
        match self.num.degree().cmp(&self.den.degree()) {
            Less => Extended::finite(0.0, 0.0),
            Equal => Extended::Finite(self.num.leading() / self.den.leading()),
            Greater => Extended::Infinity,
        }
    }

    /// R ∘ T for a Möbius map T, as a normalized rational map: matched
    /// numerator/denominator roots are cancelled and the denominator is made
    /// monic.
    pub fn pullback(&self, t: &MobiusMap) -> Result<RationalMap> {
        if t.det().norm() <= 1e-12 * t.entry_scale() * t.entry_scale() {
            return Err(Error::DegenerateMobius);
        }
        let m = self.degree();
        let lin_num = Polynomial::new(vec![t.b, t.a]); // a z + b, ascending
        let lin_den = Polynomial::new(vec![t.d, t.c]);

        // Powers (az+b)^i (cz+d)^(m-i), shared by both sums.
        let mut pow_num = vec![Polynomial::constant(Cx::new(1.0, 0.0))];
        let mut pow_den = vec![Polynomial::constant(Cx::new(1.0, 0.0))];
        for i in 1..=m {
            pow_num.push(pow_num[i - 1].mul(&lin_num));
            pow_den.push(pow_den[i - 1].mul(&lin_den));
        }
        let clear = |p: &Polynomial| {
            let mut acc = Polynomial::zero();
            for i in 0..=p.degree() {
                let c = p.coeff(i);
                if c.norm() == 0.0 {
                    continue;
                }
                acc = acc.add(&pow_num[i].mul(&pow_den[m - i]).scale(c));
            }
            acc
        };
        let raw_num = clear(&self.num);
        let raw_den = clear(&self.den);
        let (num, den) = cancel_common_roots(&raw_num, &raw_den)?;
        let lead = den.leading();
        if lead.norm() == 0.0 {
            return Err(Error::ZeroDenominator);
        }
        let inv = Cx::new(1.0, 0.0) / lead;
        RationalMap::new(num.scale(inv), den.scale(inv))
    }
}

/// Numeric GCD by root matching: factors whose roots coincide within
/// [`GCD_TOL`] (relative) are divided out of both polynomials.
fn cancel_common_roots(num: &Polynomial, den: &Polynomial) -> Result<(Polynomial, Polynomial)> {
    if num.is_zero() || num.degree() == 0 || den.degree() == 0 {
        return Ok((num.clone(), den.clone()));
    }
    let rn = poly_roots(num)?;
    let rd = poly_roots(den)?;
    let scale = 1.0
        + rn.iter()
            .chain(rd.iter())
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
    let mut keep_n = vec![true; rn.len()];
    let mut keep_d = vec![true; rd.len()];
    for (i, a) in rn.iter().enumerate() {
        for (j, b) in rd.iter().enumerate() {
            if keep_n[i] && keep_d[j] && (a - b).norm() <= GCD_TOL * scale {
                keep_n[i] = false;
                keep_d[j] = false;
                break;
            }
        }
    }
    if keep_n.iter().all(|k| *k) {
        // Nothing cancels: keep the original coefficients rather than
        // reconstructing from computed roots, which costs precision at
        // multiple roots.
        return Ok((num.clone(), den.clone()));
    }
    let nn: Vec<Cx> = rn
        .iter()
        .zip(&keep_n)
        .filter(|(_, k)| **k)
        .map(|(r, _)| *r)
        .collect();
    let dd: Vec<Cx> = rd
        .iter()
        .zip(&keep_d)
        .filter(|(_, k)| **k)
        .map(|(r, _)| *r)
        .collect();
    let num_out = Polynomial::from_roots(&nn).scale(num.leading());
    let den_out = Polynomial::from_roots(&dd).scale(den.leading());
    Ok((num_out, den_out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::testutil::*;

    fn kappa_map(kappa: f64) -> RationalMap {
        // (f² − κ²)/(f² − 1)
        RationalMap::new(
            Polynomial::new(vec![cx(-kappa * kappa, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]),
            Polynomial::new(vec![cx(-1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]),
        )
        .unwrap()
    }

    #[test]
    fn eval_finite_pole_identity() {
        let r = kappa_map(2.0);
        assert_close(
            r.eval(cx(3.0, 0.0)).unwrap().as_finite().unwrap(),
            cx(5.0 / 8.0, 0.0),
            1e-14,
            "(9-4)/(9-1)",
        );
        assert!(r.eval(cx(1.0, 0.0)).unwrap().is_infinite());

        let id = RationalMap::identity();
        assert_eq!(id.eval(cx(2.5, -1.0)).unwrap(), Extended::finite(2.5, -1.0));
    }

    // 0/0 at an evaluation point reports an error, not a value.
    #[test]
    fn indeterminate_evaluation_rejected() {
        let r = RationalMap::new(
            Polynomial::zero(),
            Polynomial::new(vec![cx(-1.0, 0.0), cx(1.0, 0.0)]),
        )
        .unwrap();
        assert!(matches!(
            r.eval(cx(1.0, 0.0)),
            Err(Error::CommonRootEvaluation)
        ));
        assert_eq!(r.eval(cx(2.0, 0.0)).unwrap(), Extended::finite(0.0, 0.0));
    }

    #[test]
    fn common_factor_rejected() {
        // (f-1)(f-2) / (f-1)(f+3)
        let num = Polynomial::from_roots(&[cx(1.0, 0.0), cx(2.0, 0.0)]);
        let den = Polynomial::from_roots(&[cx(1.0, 0.0), cx(-3.0, 0.0)]);
        assert!(matches!(
            RationalMap::new(num, den),
            Err(Error::CommonFactor)
        ));
    }

    // Pullback of 1 − f³ under f ↦ 1/f is 1 − f⁻³ = (f³ − 1)/f³.
    #[test]
    fn pullback_cubic_inversion() {
        let r = RationalMap::new(
            Polynomial::new(vec![
                cx(1.0, 0.0),
                cx(0.0, 0.0),
                cx(0.0, 0.0),
                cx(-1.0, 0.0),
            ]),
            Polynomial::constant(cx(1.0, 0.0)),
        )
        .unwrap();
        let pulled = r.pullback(&MobiusMap::inversion()).unwrap();
        for z in [cx(2.0, 0.0), cx(0.5, 0.3), cx(-1.2, 0.8)] {
            let want = cx(1.0, 0.0) - z.powi(-3);
            assert_close(
                pulled.eval(z).unwrap().as_finite().unwrap(),
                want,
                1e-12 * (1.0 + want.norm()),
                "1 - f^-3",
            );
        }
        assert_eq!(pulled.num().degree(), 3);
        assert_eq!(pulled.den().degree(), 3);
    }

    #[test]
    fn pullback_by_identity_is_identity_action() {
        let r = kappa_map(2.0);
        let p = r.pullback(&MobiusMap::identity()).unwrap();
        for z in [cx(3.0, 0.0), cx(0.2, 1.4)] {
            assert_close(
                p.eval(z).unwrap().as_finite().unwrap(),
                r.eval(z).unwrap().as_finite().unwrap(),
                1e-12,
                "identity pullback",
            );
        }
    }

    #[test]
    fn pullback_round_trip_recovers_coefficients() {
        let r = kappa_map(2.0);
        let t = MobiusMap::new(cx(1.0, 0.5), cx(0.3, 0.0), cx(0.2, -0.1), cx(1.0, 0.0)).unwrap();
        let back = r.pullback(&t).unwrap().pullback(&t.inverse()).unwrap();
        // Both maps are den-monic, so coefficients must line up directly.
        for i in 0..=2 {
            assert_close(back.num().coeff(i), r.num().coeff(i), 1e-12, "num coeff");
            assert_close(back.den().coeff(i), r.den().coeff(i), 1e-12, "den coeff");
        }
    }

    #[test]
    fn pullback_respects_composition() {
        let r = kappa_map(3.0);
        let t1 = MobiusMap::new(cx(1.0, 0.2), cx(-0.4, 0.0), cx(0.0, 0.1), cx(0.9, 0.0)).unwrap();
        let t2 = MobiusMap::new(cx(0.7, 0.0), cx(0.2, 0.3), cx(0.1, 0.0), cx(1.2, -0.2)).unwrap();
        let lhs = r.pullback(&t1).unwrap().pullback(&t2).unwrap();
        let rhs = r.pullback(&t1.compose(&t2)).unwrap();
        for i in 0..=lhs.degree() {
            assert_close(lhs.num().coeff(i), rhs.num().coeff(i), 1e-10, "num");
            assert_close(lhs.den().coeff(i), rhs.den().coeff(i), 1e-10, "den");
        }
    }

    #[test]
    fn value_at_infinity_by_degree() {
        assert_eq!(
            kappa_map(2.0).eval_at_infinity(),
            Extended::finite(1.0, 0.0)
        );
        let grows = RationalMap::new(
            Polynomial::new(vec![cx(1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]),
            Polynomial::new(vec![cx(0.5, 0.0), cx(1.0, 0.0)]),
        )
        .unwrap();
        assert!(grows.eval_at_infinity().is_infinite());
    }
}

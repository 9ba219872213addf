//! Forward iteration of f(z+1)^n = R(f(z)) along the integer lattice, with
//! explicit n-th-root branch policies, residual auditing, and the
//! h/H substitution chain used by equation E14.

use crate::catalog::{CanonicalEquation, EquationId};
use crate::numkit::{Cx, Extended};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Relative residual tolerance every freshly iterated orbit satisfies.
pub const ORBIT_TOL: f64 = 1e-9;

/// Rule for selecting which n-th root of R(f_m) becomes f_{m+1}.
///
/// The solutions of these equations are globally meromorphic; pointwise
/// iteration needs an explicit branch rule, and continuity tracking
/// (`NearestPrediction`) is the numerical surrogate for meromorphy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BranchPolicy {
    /// Always the principal root (argument divided by n).
    Principal,
    /// Quadratic extrapolation of the last three values (linear from two,
    /// principal from one), then the root nearest the prediction.
    NearestPrediction,
    /// Root indices 0..n−1, one per step; must cover every step taken.
    FixedSequence(Vec<usize>),
}

/// A finite stretch of lattice samples with per-step branch records and
/// singularity flags.
///
/// Invariant: `values.len() == singular.len() == branches.len() + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub values: Vec<Extended>,
    pub branches: Vec<usize>,
    pub singular: Vec<bool>,
    pub eq_id: Option<EquationId>,
}

impl Orbit {
    /// Wrap externally produced samples (for example from an exact-solution
    /// formula); branch records are zeroed and singular flags mirror the
    /// infinite entries.
    pub fn from_samples(values: Vec<Extended>) -> Self {
        let singular = values.iter().map(Extended::is_infinite).collect();
        let branches = vec![0; values.len().saturating_sub(1)];
        Orbit {
            values,
            branches,
            singular,
            eq_id: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// CSV with columns m, re, im, branch, singular; full 17-significant-
    /// digit formatting so values re-ingest bit-faithfully. The seed row has
    /// branch −1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,re,im,branch,singular\n");
        for (m, v) in self.values.iter().enumerate() {
            let (re, im) = match v {
                Extended::Finite(z) => (z.re, z.im),
                Extended::Infinity => (f64::INFINITY, f64::INFINITY),
            };
            let branch = if m == 0 {
                -1i64
            } else {
                self.branches[m - 1] as i64
            };
            out.push_str(&format!(
                "{m},{re:.16e},{im:.16e},{branch},{}\n",
                self.singular[m]
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let samples: Vec<serde_json::Value> = self
            .values
            .iter()
            .enumerate()
            .map(|(m, v)| {
                let (re, im) = match v {
                    Extended::Finite(z) => (Some(z.re), Some(z.im)),
                    Extended::Infinity => (None, None),
                };
                serde_json::json!({
                    "m": m,
                    "re": re,
                    "im": im,
                    "branch": if m == 0 { None } else { Some(self.branches[m - 1]) },
                    "singular": self.singular[m],
                })
            })
            .collect();
        serde_json::json!({
            "schema_version": "1",
            "eq": self.eq_id.map(|id| id.to_string()),
            "samples": samples,
        })
    }
}

/// The n roots of wⁿ = v, ordered so index 0 is the principal root and
/// index j carries the extra phase 2πj/n. The principal root comes from the
/// library sqrt/cbrt and the others from exact root-of-unity factors, which
/// keeps lattice-exact chains (like the quarter-period sine samples) free
/// of arg/cos reconstruction noise.
fn nth_roots(v: Cx, n: u32) -> Vec<Cx> {
    match n {
        1 => vec![v],
        2 => {
            let w = v.sqrt();
            vec![w, -w]
        }
        3 => {
            let w = v.cbrt();
            let u = Cx::new(-0.5, 3.0_f64.sqrt() / 2.0);
            vec![w, w * u, w * u.conj()]
        }
        _ => {
            let r = v.norm().powf(1.0 / n as f64);
            let base = v.arg() / n as f64;
            (0..n)
                .map(|j| {
                    let th = base + 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                    Cx::new(r * th.cos(), r * th.sin())
                })
                .collect()
        }
    }
}

/// Extrapolate the next value from the trailing run of finite samples.
fn predict(values: &[Extended]) -> Option<Cx> {
    let mut tail: Vec<Cx> = Vec::new();
    for v in values.iter().rev() {
        match v {
            Extended::Finite(z) if tail.len() < 3 => tail.push(*z),
            _ => break,
        }
    }
    tail.reverse();
    match tail.as_slice() {
        [a, b, c] => Some(c * 3.0 - b * 3.0 + a),
        [b, c] => Some(c * 2.0 - b),
        _ => None,
    }
}

/// Iterate `steps` times from `f0`, selecting one n-th root of R(f_m) per
/// step according to `policy`.
///
/// A pole of R flags the next entry singular; iteration continues from
/// R(∞) when that value is finite (deg num ≤ deg den) and stops otherwise.
pub fn iterate(
    eq: &CanonicalEquation,
    f0: Cx,
    steps: usize,
    policy: &BranchPolicy,
) -> Result<Orbit> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    let mut values = vec![Extended::Finite(f0)];
    let mut branches = Vec::new();
    let mut singular = vec![false];

    for step in 0..steps {
        let cur = *values.last().unwrap();
        let target = match cur {
            Extended::Finite(z) => match eq.r.eval(z) {
                Ok(v) => v,
                Err(Error::CommonRootEvaluation) => {
                    return Err(Error::IndeterminateIterate { step })
                }
                Err(e) => return Err(e),
            },
            Extended::Infinity => eq.r.eval_at_infinity(),
        };
        match target {
            Extended::Infinity => {
                if cur.is_infinite() {
                    // R(∞) = ∞: the orbit cannot leave the point at
                    // infinity; stop here.
                    break;
                }
                values.push(Extended::Infinity);
                branches.push(0);
                singular.push(true);
            }
            Extended::Finite(v) => {
                let roots = nth_roots(v, eq.n);
                let j = match policy {
                    BranchPolicy::Principal => 0,
                    BranchPolicy::FixedSequence(seq) => {
                        let j = *seq
                            .get(step)
                            .ok_or(Error::BranchSequenceExhausted { step })?;
                        if j as u32 >= eq.n {
                            return Err(Error::InvalidParameter(format!(
                                "branch index {j} out of range for n = {}",
                                eq.n
                            )));
                        }
                        j
                    }
                    BranchPolicy::NearestPrediction => match predict(&values) {
                        Some(p) => roots
                            .iter()
                            .enumerate()
                            .min_by(|(_, a), (_, b)| {
                                (*a - p).norm().partial_cmp(&(*b - p).norm()).unwrap()
                            })
                            .map(|(j, _)| j)
                            .unwrap(),
                        None => 0,
                    },
                };
                values.push(Extended::Finite(roots[j]));
                branches.push(j);
                singular.push(false);
            }
        }
    }

    Ok(Orbit {
        values,
        branches,
        singular,
        eq_id: Some(eq.id),
    })
}

/// Max over non-singular consecutive pairs of
/// |f_{m+1}ⁿ − R(f_m)| / (1 + |R(f_m)|).
pub fn orbit_residual(eq: &CanonicalEquation, orb: &Orbit) -> f64 {
    let mut worst = 0.0_f64;
    for m in 0..orb.len().saturating_sub(1) {
        if orb.singular[m] || orb.singular[m + 1] {
            continue;
        }
        let (f, fb) = match (orb.values[m], orb.values[m + 1]) {
            (Extended::Finite(a), Extended::Finite(b)) => (a, b),
            _ => continue,
        };
        let r = match eq.r.eval(f) {
            Ok(Extended::Finite(v)) => v,
            _ => continue,
        };
        let lhs = fb.powu(eq.n);
        worst = worst.max((lhs - r).norm() / (1.0 + r.norm()));
    }
    worst
}

/// Output of [`h_substitution_chain`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HChain {
    /// h_m = √((f_m + iη)/(f_m − iη)), sign chosen for sequence continuity.
    pub h_seq: Vec<Cx>,
    /// H_m = (h_m² + 1)/(2h_m).
    pub big_h_seq: Vec<Cx>,
    /// max_m |v(f_{m+1})ᵀ C v(H_m)| on the curve x²y² − x² − y² − η² = 0.
    pub curve_residual: f64,
}

/// The substitution chain for equation E14: from an orbit of
/// f̄² = η²(f² − 1), build h² = (f + iη)/(f − iη) and H = (h² + 1)/(2h);
/// consecutive pairs (f_{m+1}, H_m) then lie on the biquadratic
/// x²y² − (x² + y²) − η² = 0.
pub fn h_substitution_chain(orbit: &Orbit, eta: Cx) -> Result<HChain> {
    let ieta = Cx::new(0.0, 1.0) * eta;
    let mut h_seq: Vec<Cx> = Vec::new();
    let mut big_h_seq = Vec::new();
    let mut fs = Vec::new();
    for v in &orbit.values {
        let f = v
            .as_finite()
            .ok_or_else(|| Error::InvalidParameter("infinite orbit entry in h-chain".into()))?;
        let scale = 1.0 + f.norm();
        if (f - ieta).norm() <= 1e-12 * scale {
            return Err(Error::BranchPointHit);
        }
        if (f + ieta).norm() <= 1e-12 * scale {
            // h = 0 makes H blow up.
            return Err(Error::BranchPointHit);
        }
        let w = (f + ieta) / (f - ieta);
        let mut h = w.sqrt();
        if let Some(prev) = h_seq.last() {
            if (h - prev).norm() > (-h - prev).norm() {
                h = -h;
            }
        }
        big_h_seq.push((h * h + Cx::new(1.0, 0.0)) / (h * 2.0));
        h_seq.push(h);
        fs.push(f);
    }

    let curve = e14_h_curve(eta);
    let mut worst = 0.0_f64;
    for m in 0..fs.len().saturating_sub(1) {
        worst = worst.max(curve.eval(fs[m + 1], big_h_seq[m]).norm());
    }
    Ok(HChain {
        h_seq,
        big_h_seq,
        curve_residual: worst,
    })
}

/// The H-curve x²y² − x² − y² − η² = 0 relating (f̄, H) for equation E14.
pub fn e14_h_curve(eta: Cx) -> crate::qrt::Biquadratic {
    let z = Cx::new(0.0, 0.0);
    let one = Cx::new(1.0, 0.0);
    crate::qrt::Biquadratic::new([[one, z, -one], [z, z, z], [-one, z, -eta * eta]]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_get, exact_solution, CanonicalEquation, EquationId, Params};
    use crate::numkit::testutil::*;

    fn eq(id: EquationId, pairs: &[(&str, Cx)]) -> CanonicalEquation {
        let params: Params = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        catalog_get(id, &params).unwrap()
    }

    fn eta23() -> Cx {
        Cx::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)
    }

    // The fixed branch pattern (0,0,1,0) reproduces sin(πz/2) samples from
    // f0 = 0; the principal policy takes the other valid chain (0,1,0,1,…).
    #[test]
    fn e9_fixed_sequence_gives_sine_samples() {
        let e9 = eq(EquationId::E9, &[]);
        let seq = vec![0, 0, 1, 0, 0, 0, 1, 0];
        let orb = iterate(&e9, cx(0.0, 0.0), 8, &BranchPolicy::FixedSequence(seq)).unwrap();
        let want = [0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0];
        for (v, w) in orb.values.iter().zip(want.iter()) {
            assert_close(v.as_finite().unwrap(), cx(*w, 0.0), 1e-12, "sine sample");
        }

        let principal = iterate(&e9, cx(0.0, 0.0), 6, &BranchPolicy::Principal).unwrap();
        let want = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        for (v, w) in principal.values.iter().zip(want.iter()) {
            assert_close(v.as_finite().unwrap(), cx(*w, 0.0), 1e-12, "principal chain");
        }
    }

    #[test]
    fn e18_principal_orbit_passes_audit() {
        let e18 = eq(EquationId::E18, &[]);
        let orb = iterate(&e18, cx(0.5, 0.0), 20, &BranchPolicy::Principal).unwrap();
        assert_eq!(orb.len(), 21);
        assert!(orbit_residual(&e18, &orb) <= 1e-9);
    }

    // f0 = 1 is a pole of R for E12; the next entry is flagged singular and
    // iteration continues from R(∞) = 1.
    #[test]
    fn e12_pole_flags_and_continues() {
        let e12 = eq(EquationId::E12, &[("kappa", cx(2.0, 0.0))]);
        let orb = iterate(&e12, cx(1.0, 0.0), 4, &BranchPolicy::Principal).unwrap();
        assert!(orb.values[1].is_infinite());
        assert!(orb.singular[1]);
        assert!(!orb.singular[2]);
        assert_close(
            orb.values[2].as_finite().unwrap(),
            cx(1.0, 0.0),
            1e-12,
            "continuation from R(∞)",
        );
    }

    #[test]
    fn nearest_prediction_orbits_audit_clean() {
        for (id, params) in [
            (EquationId::E9, vec![]),
            (EquationId::E12, vec![("kappa", cx(2.0, 0.0))]),
            (EquationId::E14, vec![("eta", eta23())]),
        ] {
            let e = eq(id, &params);
            let orb = iterate(&e, cx(0.37, 0.21), 50, &BranchPolicy::NearestPrediction).unwrap();
            let res = orbit_residual(&e, &orb);
            assert!(res <= 1e-9, "{id:?}: residual {res:.3e}");
        }
    }

    #[test]
    fn exact_e9_samples_have_zero_residual() {
        let e9 = eq(EquationId::E9, &[]);
        let sampler = exact_solution(EquationId::E9, &Params::new(), cx(0.0, 0.0)).unwrap();
        let values: Vec<Extended> = (0..30).map(&sampler).collect();
        let orb = Orbit::from_samples(values);
        assert!(orbit_residual(&e9, &orb) < 1e-14);
    }

    #[test]
    fn residual_detects_perturbation() {
        let e9 = eq(EquationId::E9, &[]);
        let sampler = exact_solution(EquationId::E9, &Params::new(), cx(0.3, 0.0)).unwrap();
        let mut values: Vec<Extended> = (0..20).map(&sampler).collect();
        if let Extended::Finite(z) = values[10] {
            values[10] = Extended::Finite(z + cx(1e-3, 0.0));
        }
        let orb = Orbit::from_samples(values);
        assert!(orbit_residual(&e9, &orb) > 1e-4);
    }

    #[test]
    fn fixed_sequence_exhaustion_errors() {
        let e9 = eq(EquationId::E9, &[]);
        let r = iterate(&e9, cx(0.2, 0.0), 5, &BranchPolicy::FixedSequence(vec![0, 1]));
        assert!(matches!(r, Err(Error::BranchSequenceExhausted { step: 2 })));
    }

    #[test]
    fn h_chain_30_step_curve_residual() {
        let eta = eta23();
        let e14 = eq(EquationId::E14, &[("eta", eta)]);
        let orb = iterate(&e14, cx(0.4, 0.3), 30, &BranchPolicy::NearestPrediction).unwrap();
        let chain = h_substitution_chain(&orb, eta).unwrap();
        assert_eq!(chain.h_seq.len(), orb.len());
        assert!(
            chain.curve_residual < 1e-8,
            "curve residual {:.3e}",
            chain.curve_residual
        );
    }

    // f = 0 makes (f + iη)/(f − iη) = −1 unimodular, so |h| = 1; and H is
    // invariant under h ↦ 1/h.
    #[test]
    fn h_chain_modulus_and_symmetry() {
        let eta = eta23();
        let values = vec![Extended::finite(0.0, 0.0)];
        let chain = h_substitution_chain(&Orbit::from_samples(values), eta).unwrap();
        assert_close_f(chain.h_seq[0].norm(), 1.0, 1e-12, "|h| = 1");

        let h = cx(0.7, 0.4);
        let big = |h: Cx| (h * h + cx(1.0, 0.0)) / (h * 2.0);
        assert_close(big(h), big(cx(1.0, 0.0) / h), 1e-13, "H(h) = H(1/h)");
    }

    #[test]
    fn h_chain_rejects_branch_points() {
        let eta = eta23();
        let ieta = cx(0.0, 1.0) * eta;
        for bad in [ieta, -ieta] {
            let orb = Orbit::from_samples(vec![Extended::Finite(bad)]);
            assert!(matches!(
                h_substitution_chain(&orb, eta),
                Err(Error::BranchPointHit)
            ));
        }
    }

    #[test]
    fn csv_and_json_serialization() {
        let e12 = eq(EquationId::E12, &[("kappa", cx(2.0, 0.0))]);
        let orb = iterate(&e12, cx(1.0, 0.0), 3, &BranchPolicy::Principal).unwrap();
        let csv = orb.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "m,re,im,branch,singular");
        let first = lines.next().unwrap();
        assert!(first.starts_with("0,") && first.ends_with(",-1,false"));
        let second = lines.next().unwrap();
        assert!(second.contains("inf") && second.ends_with(",true"));
        assert_eq!(csv.lines().count(), 1 + orb.len());

        // 17-significant-digit fields re-ingest bit-faithfully.
        let third = lines.next().unwrap();
        let re_str = third.split(',').nth(1).unwrap();
        let parsed: f64 = re_str.parse().unwrap();
        assert_eq!(parsed, orb.values[2].as_finite().unwrap().re);

        let json = orb.to_json();
        assert_eq!(json["schema_version"], "1");
        assert_eq!(json["eq"], "E12");
        assert_eq!(json["samples"].as_array().unwrap().len(), orb.len());
        assert!(json["samples"][1]["re"].is_null());
    }

    // n = 1 equations (linear and Riccati) iterate through the same path;
    // the single "root" is the value itself.
    #[test]
    fn linear_and_riccati_orbits() {
        let lin = eq(
            EquationId::Linear,
            &[("a1", cx(0.5, 0.2)), ("a2", cx(1.0, 0.0))],
        );
        let orb = iterate(&lin, cx(0.3, 0.0), 15, &BranchPolicy::Principal).unwrap();
        assert!(orbit_residual(&lin, &orb) < 1e-13);

        let ric = eq(
            EquationId::Riccati,
            &[("b1", cx(2.0, 0.0)), ("b2", cx(1.0, 0.0)), ("b3", cx(1.0, 0.0))],
        );
        let orb = iterate(&ric, cx(0.4, 0.1), 15, &BranchPolicy::NearestPrediction).unwrap();
        assert!(orbit_residual(&ric, &orb) < 1e-12);
    }

    #[test]
    fn zero_steps_rejected() {
        let e9 = eq(EquationId::E9, &[]);
        assert!(matches!(
            iterate(&e9, cx(0.2, 0.0), 0, &BranchPolicy::Principal),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn orbit_length_invariant() {
        let e16 = eq(EquationId::E16, &[]);
        let orb = iterate(&e16, cx(0.3, 0.1), 12, &BranchPolicy::NearestPrediction).unwrap();
        assert_eq!(orb.values.len(), orb.branches.len() + 1);
        assert_eq!(orb.values.len(), orb.singular.len());
    }
}

//! The canonical-equation registry: autonomous Malmquist-type difference
//! equations E6–E19 with parameter constraints, constraint solvers,
//! associated biquadratic curves and known exact-solution constructors.
//!
//! Equation ids follow the customary numbering: E6 is the linear equation
//! f̄ = a₁f + a₂, E7 the difference Riccati equation
//! f̄ = (b₁f + b₂)/(f + b₃), and E9–E19 are
//!
//! ```text
//! E9   f̄² = 1 − f²
//! E10  f̄² = 1 − ((δf − 1)/(f − δ))²          δ ≠ ±1
//! E11  f̄² = 1 − ((f + 3)/(f − 1))²
//! E12  f̄² = (f² − κ²)/(f² − 1)               κ² ∉ {0, 1}
//! E13  f̄³ = 1 − f⁻³
//! E14  f̄² = η²(f² − 1)                       η³ = 1, η ≠ 1
//! E15  f̄² = 2(1 − f⁻²)
//! E16  f̄² = (1 + f²)/(1 − f²)
//! E17  f̄² = θ(f² − κ₁f + 1)/(f² + κ₁f + 1)   θ = ±1,
//!          κ₁²(κ₁² − 4) = 2(1 − θ)κ₁² − 8(1 + θ)
//! E18  f̄³ = 1 − f³
//! E19  f̄² = ½·(1+δ)²/(1+δ²)·(f−1)(f−δ²)/(f−δ)²
//!          δ ∉ {0, ±1, ±i},  8δ⁵(δ² + 1) − (δ + 1)⁴ = 0
//! ```
//!
//! Coefficients are constants throughout (the autonomous case).

use crate::elliptic::jacobi_sn_cn_dn;
use crate::numkit::{deflate, poly_roots, Cx, Extended, MobiusMap, Polynomial, RationalMap};
use crate::qrt::{
    parametrize_symmetric, Biquadratic, SymmetricQRTParams, POLE_THRESHOLD,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Parameter map by name; `BTreeMap` keeps serialization deterministic.
pub type Params = BTreeMap<String, Cx>;

const EXCL_TOL: f64 = 1e-9;

/// Identifiers of the registered canonical equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EquationId {
    Linear,
    Riccati,
    E9,
    E10,
    E11,
    E12,
    E13,
    E14,
    E15,
    E16,
    E17,
    E18,
    E19,
}

impl EquationId {
    pub const ALL: [EquationId; 13] = [
        EquationId::Linear,
        EquationId::Riccati,
        EquationId::E9,
        EquationId::E10,
        EquationId::E11,
        EquationId::E12,
        EquationId::E13,
        EquationId::E14,
        EquationId::E15,
        EquationId::E16,
        EquationId::E17,
        EquationId::E18,
        EquationId::E19,
    ];
}

impl fmt::Display for EquationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EquationId::Linear => "E6",
            EquationId::Riccati => "E7",
            EquationId::E9 => "E9",
            EquationId::E10 => "E10",
            EquationId::E11 => "E11",
            EquationId::E12 => "E12",
            EquationId::E13 => "E13",
            EquationId::E14 => "E14",
            EquationId::E15 => "E15",
            EquationId::E16 => "E16",
            EquationId::E17 => "E17",
            EquationId::E18 => "E18",
            EquationId::E19 => "E19",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for EquationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        let id = match t.as_str() {
            "E6" | "LINEAR" => EquationId::Linear,
            "E7" | "RICCATI" => EquationId::Riccati,
            "E9" => EquationId::E9,
            "E10" => EquationId::E10,
            "E11" => EquationId::E11,
            "E12" => EquationId::E12,
            "E13" => EquationId::E13,
            "E14" => EquationId::E14,
            "E15" => EquationId::E15,
            "E16" => EquationId::E16,
            "E17" => EquationId::E17,
            "E18" => EquationId::E18,
            "E19" => EquationId::E19,
            _ => return Err(Error::UnknownEquation(s.to_string())),
        };
        Ok(id)
    }
}

/// Static description of one registry entry (no parameter values).
#[derive(Debug, Clone, Serialize)]
pub struct EquationInfo {
    pub id: &'static str,
    pub n: u32,
    pub form: &'static str,
    pub param_names: &'static [&'static str],
    pub constraints: &'static [&'static str],
    pub admissible_hint: &'static str,
}

/// The registry listing, in id order.
pub fn registry() -> Vec<EquationInfo> {
    vec![
        EquationInfo {
            id: "E6",
            n: 1,
            form: "f(z+1) = a1·f + a2",
            param_names: &["a1", "a2"],
            constraints: &[],
            admissible_hint: "a1 ≠ 0",
        },
        EquationInfo {
            id: "E7",
            n: 1,
            form: "f(z+1) = (b1·f + b2)/(f + b3)",
            param_names: &["b1", "b2", "b3"],
            constraints: &["b2 ≠ b1·b3"],
            admissible_hint: "any nondegenerate (b1, b2, b3)",
        },
        EquationInfo {
            id: "E9",
            n: 2,
            form: "f(z+1)^2 = 1 - f^2",
            param_names: &[],
            constraints: &[],
            admissible_hint: "none",
        },
        EquationInfo {
            id: "E10",
            n: 2,
            form: "f(z+1)^2 = 1 - ((delta·f - 1)/(f - delta))^2",
            param_names: &["delta"],
            constraints: &["delta ≠ ±1"],
            admissible_hint: "constant delta, delta ≠ ±1",
        },
        EquationInfo {
            id: "E11",
            n: 2,
            form: "f(z+1)^2 = 1 - ((f + 3)/(f - 1))^2",
            param_names: &[],
            constraints: &[],
            admissible_hint: "none",
        },
        EquationInfo {
            id: "E12",
            n: 2,
            form: "f(z+1)^2 = (f^2 - kappa^2)/(f^2 - 1)",
            param_names: &["kappa"],
            constraints: &["kappa^2 ∉ {0, 1}"],
            admissible_hint: "e.g. kappa = 2",
        },
        EquationInfo {
            id: "E13",
            n: 3,
            form: "f(z+1)^3 = 1 - f^{-3}",
            param_names: &[],
            constraints: &[],
            admissible_hint: "none",
        },
        EquationInfo {
            id: "E14",
            n: 2,
            form: "f(z+1)^2 = eta^2·(f^2 - 1)",
            param_names: &["eta"],
            constraints: &["eta^3 = 1", "eta ≠ 1"],
            admissible_hint: "eta = exp(±2πi/3)",
        },
        EquationInfo {
            id: "E15",
            n: 2,
            form: "f(z+1)^2 = 2·(1 - f^{-2})",
            param_names: &[],
            constraints: &[],
            admissible_hint: "none",
        },
        EquationInfo {
            id: "E16",
            n: 2,
            form: "f(z+1)^2 = (1 + f^2)/(1 - f^2)",
            param_names: &[],
            constraints: &[],
            admissible_hint: "none",
        },
        EquationInfo {
            id: "E17",
            n: 2,
            form: "f(z+1)^2 = theta·(f^2 - kappa1·f + 1)/(f^2 + kappa1·f + 1)",
            param_names: &["theta", "kappa1"],
            constraints: &["kappa1^2·(kappa1^2 - 4) = 2(1 - theta)·kappa1^2 - 8(1 + theta)"],
            admissible_hint: "theta = -1: kappa1 = ±2√2; theta = 1: kappa1^2 = 2 ± 2i√3",
        },
        EquationInfo {
            id: "E18",
            n: 3,
            form: "f(z+1)^3 = 1 - f^3",
            param_names: &[],
            constraints: &[],
            admissible_hint: "none",
        },
        EquationInfo {
            id: "E19",
            n: 2,
            form: "f(z+1)^2 = (1/2)·(1+delta)^2/(1+delta^2)·(f-1)(f-delta^2)/(f-delta)^2",
            param_names: &["delta"],
            constraints: &["8·delta^5·(delta^2 + 1) - (delta + 1)^4 = 0"],
            admissible_hint: "delta ∉ {0, ±1, ±i}; six admissible roots after deflating delta = 1",
        },
    ]
}

/// A validated, materialized equation instance.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalEquation {
    pub id: EquationId,
    /// The left-hand exponent n in f(z+1)^n = R(f).
    pub n: u32,
    pub r: RationalMap,
    pub params: Params,
}

fn get_param(id: EquationId, params: &Params, name: &str) -> Result<Cx> {
    params.get(name).copied().ok_or(Error::MissingParameter {
        id: id.to_string(),
        name: name.to_string(),
    })
}

fn reject(id: EquationId, relation: &str) -> Error {
    Error::ConstraintViolation {
        id: id.to_string(),
        relation: relation.to_string(),
    }
}

fn poly(coeffs: &[Cx]) -> Polynomial {
    Polynomial::new(coeffs.to_vec())
}

fn c(re: f64) -> Cx {
    Cx::new(re, 0.0)
}

/// Validate parameters and materialize R for the given equation.
pub fn catalog_get(id: EquationId, params: &Params) -> Result<CanonicalEquation> {
    let one = c(1.0);
    let zero = c(0.0);
    let (n, r) = match id {
        EquationId::Linear => {
            let a1 = get_param(id, params, "a1")?;
            let a2 = get_param(id, params, "a2")?;
            if a1.norm() < EXCL_TOL {
                return Err(reject(id, "a1 ≠ 0"));
            }
            (1, RationalMap::new(poly(&[a2, a1]), poly(&[one]))?)
        }
        EquationId::Riccati => {
            let b1 = get_param(id, params, "b1")?;
            let b2 = get_param(id, params, "b2")?;
            let b3 = get_param(id, params, "b3")?;
            if (b2 - b1 * b3).norm() < EXCL_TOL * (1.0 + b2.norm() + (b1 * b3).norm()) {
                return Err(reject(id, "b2 ≠ b1·b3"));
            }
            (1, RationalMap::new(poly(&[b2, b1]), poly(&[b3, one]))?)
        }
        EquationId::E9 => (2, RationalMap::new(poly(&[one, zero, -one]), poly(&[one]))?),
        EquationId::E10 => {
            let delta = get_param(id, params, "delta")?;
            if (delta - one).norm() < EXCL_TOL || (delta + one).norm() < EXCL_TOL {
                return Err(reject(id, "delta ≠ ±1"));
            }
            // 1 − ((δf−1)/(f−δ))² = (1−δ²)(f²−1)/(f−δ)².
            let lead = one - delta * delta;
            let num = poly(&[-lead, zero, lead]);
            let den = poly(&[delta * delta, -delta * 2.0, one]);
            (2, RationalMap::new(num, den)?)
        }
        EquationId::E11 => {
            // 1 − ((f+3)/(f−1))² = −8(f+1)/(f−1)².
            let num = poly(&[c(-8.0), c(-8.0)]);
            let den = poly(&[one, c(-2.0), one]);
            (2, RationalMap::new(num, den)?)
        }
        EquationId::E12 => {
            let kappa = get_param(id, params, "kappa")?;
            let k2 = kappa * kappa;
            if k2.norm() < EXCL_TOL || (k2 - one).norm() < EXCL_TOL {
                return Err(reject(id, "kappa^2 ∉ {0, 1}"));
            }
            (
                2,
                RationalMap::new(poly(&[-k2, zero, one]), poly(&[-one, zero, one]))?,
            )
        }
        EquationId::E13 => (
            3,
            RationalMap::new(
                poly(&[-one, zero, zero, one]),
                poly(&[zero, zero, zero, one]),
            )?,
        ),
        EquationId::E14 => {
            let eta = get_param(id, params, "eta")?;
            if (eta.powu(3) - one).norm() > EXCL_TOL {
                return Err(reject(id, "eta^3 = 1"));
            }
            if (eta - one).norm() < EXCL_TOL {
                return Err(reject(id, "eta ≠ 1"));
            }
            let e2 = eta * eta;
            (2, RationalMap::new(poly(&[-e2, zero, e2]), poly(&[one]))?)
        }
        EquationId::E15 => (
            2,
            RationalMap::new(poly(&[c(-2.0), zero, c(2.0)]), poly(&[zero, zero, one]))?,
        ),
        EquationId::E16 => (
            2,
            RationalMap::new(poly(&[one, zero, one]), poly(&[one, zero, -one]))?,
        ),
        EquationId::E17 => {
            let theta = get_param(id, params, "theta")?;
            let kappa1 = get_param(id, params, "kappa1")?;
            if (theta - one).norm() > EXCL_TOL && (theta + one).norm() > EXCL_TOL {
                return Err(reject(id, "theta = ±1"));
            }
            if kappa1.norm() < EXCL_TOL {
                return Err(reject(id, "kappa1 ≠ 0 (genuine quadratic)"));
            }
            if constraint_residual(id, params) > EXCL_TOL {
                return Err(reject(
                    id,
                    "kappa1^2(kappa1^2 - 4) = 2(1 - theta)kappa1^2 - 8(1 + theta)",
                ));
            }
            let num = poly(&[theta, -theta * kappa1, theta]);
            let den = poly(&[one, kappa1, one]);
            (2, RationalMap::new(num, den)?)
        }
        EquationId::E18 => (
            3,
            RationalMap::new(poly(&[one, zero, zero, -one]), poly(&[one]))?,
        ),
        EquationId::E19 => {
            let delta = get_param(id, params, "delta")?;
            for (bad, label) in [
                (zero, "0"),
                (one, "±1"),
                (-one, "±1"),
                (Cx::new(0.0, 1.0), "±i"),
                (Cx::new(0.0, -1.0), "±i"),
            ] {
                if (delta - bad).norm() < EXCL_TOL {
                    return Err(reject(id, &format!("delta ∉ {{0, ±1, ±i}} (hit {label})")));
                }
            }
            if constraint_residual(id, params) > EXCL_TOL {
                return Err(reject(id, "8·delta^5·(delta^2+1) - (delta+1)^4 = 0"));
            }
            let lead = (one + delta) * (one + delta) / ((one + delta * delta) * 2.0);
            // lead·(f−1)(f−δ²) over (f−δ)².
            let d2 = delta * delta;
            let num = poly(&[lead * d2, -lead * (one + d2), lead]);
            let den = poly(&[d2, -delta * 2.0, one]);
            (2, RationalMap::new(num, den)?)
        }
    };
    Ok(CanonicalEquation {
        id,
        n,
        r,
        params: params.clone(),
    })
}

/// Magnitude of the defining constraint's left-minus-right; zero for
/// unconstrained equations or missing parameters.
pub fn constraint_residual(id: EquationId, params: &Params) -> f64 {
    let one = c(1.0);
    match id {
        EquationId::E17 => {
            let (Some(&theta), Some(&k1)) = (params.get("theta"), params.get("kappa1")) else {
                return 0.0;
            };
            let k2 = k1 * k1;
            let lhs = k2 * (k2 - one * 4.0);
            let rhs = (one - theta) * k2 * 2.0 - (one + theta) * 8.0;
            (lhs - rhs).norm()
        }
        EquationId::E19 => {
            let Some(&d) = params.get("delta") else {
                return 0.0;
            };
            let lhs = d.powu(5) * (d * d + one) * 8.0;
            let rhs = (d + one).powu(4);
            (lhs - rhs).norm()
        }
        EquationId::E14 => {
            let Some(&eta) = params.get("eta") else {
                return 0.0;
            };
            (eta.powu(3) - one).norm()
        }
        _ => 0.0,
    }
}

/// All admissible parameter assignments for the constrained equations.
///
/// E17: θ = −1 gives κ₁ = ±2√2; θ = 1 gives the four κ₁ with
/// κ₁² = 2 ± 2i√3. E19: the roots of 8δ⁷ + 8δ⁵ − (δ+1)⁴ with δ = 1
/// deflated out and the exclusion set {0, ±1, ±i} filtered.
pub fn solve_constraints(id: EquationId) -> Result<Vec<Params>> {
    match id {
        EquationId::E17 => {
            let mut out = Vec::new();
            let s = 8.0_f64.sqrt();
            for k1 in [c(s), c(-s)] {
                let mut p = Params::new();
                p.insert("theta".into(), c(-1.0));
                p.insert("kappa1".into(), k1);
                out.push(p);
            }
            // θ = 1: κ₁⁴ − 4κ₁² + 16 = 0.
            let quartic = poly(&[c(16.0), c(0.0), c(-4.0), c(0.0), c(1.0)]);
            for root in poly_roots(&quartic)? {
                let mut p = Params::new();
                p.insert("theta".into(), c(1.0));
                p.insert("kappa1".into(), root);
                out.push(p);
            }
            Ok(out)
        }
        EquationId::E19 => {
            // 8δ⁷ + 8δ⁵ − (δ+1)⁴, ascending coefficients.
            let septic = poly(&[
                c(-1.0),
                c(-4.0),
                c(-6.0),
                c(-4.0),
                c(-1.0),
                c(8.0),
                c(0.0),
                c(8.0),
            ]);
            let sextic = deflate(&septic, c(1.0));
            let mut out = Vec::new();
            for mut root in poly_roots(&sextic)? {
                // Polish on the original septic so the constraint residual
                // sits at the 1e−12 level rather than inheriting deflation
                // round-off.
                let dseptic = septic.derivative();
                for _ in 0..3 {
                    let f = septic.eval(root);
                    let d = dseptic.eval(root);
                    if d.norm() > 0.0 {
                        root -= f / d;
                    }
                }
                let excluded = [
                    c(0.0),
                    c(1.0),
                    c(-1.0),
                    Cx::new(0.0, 1.0),
                    Cx::new(0.0, -1.0),
                ]
                .iter()
                .any(|b| (root - b).norm() < 1e-8);
                if excluded {
                    continue;
                }
                let mut p = Params::new();
                p.insert("delta".into(), root);
                out.push(p);
            }
            Ok(out)
        }
        _ => Err(Error::NoConstraint {
            id: id.to_string(),
        }),
    }
}

/// Whether a registered biquadratic relates (f̄, f) directly or goes
/// through the substitution variable H.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    SelfCurve,
    HChain,
}

/// The biquadratic curve registered for an equation, when there is one.
pub fn associated_curve(id: EquationId, params: &Params) -> Result<(Biquadratic, CurveKind)> {
    let one = c(1.0);
    let zero = c(0.0);
    match id {
        EquationId::E9 => Ok((Biquadratic::circle(), CurveKind::SelfCurve)),
        EquationId::E12 => {
            let kappa = get_param(id, params, "kappa")?;
            let k2 = kappa * kappa;
            // f̄²f² − f̄² − f² + κ² = 0.
            let curve = Biquadratic::new([
                [one, zero, -one],
                [zero, zero, zero],
                [-one, zero, k2],
            ])?;
            Ok((curve, CurveKind::SelfCurve))
        }
        EquationId::E14 => {
            let eta = get_param(id, params, "eta")?;
            Ok((crate::orbit::e14_h_curve(eta), CurveKind::HChain))
        }
        _ => Err(Error::NoCurveRegistered {
            id: id.to_string(),
        }),
    }
}

/// A lattice sampler z ↦ f(z) for an exact solution.
pub type SolutionSampler = Box<dyn Fn(i64) -> Extended + Send + Sync>;

/// Exact-solution constructor for E9 and E12.
///
/// E9: f(z) = sin(πz/2 + c), which satisfies f̄² = 1 − f² identically.
/// E12: the composition rescale → Möbius → elliptic parametrization:
/// f(z) = α(w − 1)/(w + 1) with w = k^{1/2}·sn(εz + c, k), where
/// (k, ε) parametrize the canonical form reached from the E12 curve via
/// f ↦ α(f − β)/(f + β), α⁴ = κ², β = 1.
pub fn exact_solution(id: EquationId, params: &Params, phase: Cx) -> Result<SolutionSampler> {
    match id {
        EquationId::E9 => {
            let half_pi = std::f64::consts::FRAC_PI_2;
            Ok(Box::new(move |z: i64| {
                let u = Cx::new(half_pi * z as f64, 0.0) + phase;
                Extended::Finite(u.sin())
            }))
        }
        EquationId::E12 => {
            let eq = catalog_get(id, params)?;
            let kappa = get_param(id, &eq.params, "kappa")?;
            let pipeline = E12Pipeline::build(kappa)?;
            let (k, eps) = (pipeline.k, pipeline.eps);
            let s_map = pipeline.s_map;
            let sqrt_k = k.sqrt();
            Ok(Box::new(move |z: i64| {
                let u = eps * z as f64 + phase;
                match jacobi_sn_cn_dn(u, k) {
                    Ok((sn, _, _)) => {
                        let w = Extended::from_raw(sqrt_k * sn, POLE_THRESHOLD);
                        match s_map.apply(w) {
                            Extended::Finite(f) => Extended::from_raw(f, POLE_THRESHOLD),
                            Extended::Infinity => Extended::Infinity,
                        }
                    }
                    Err(_) => Extended::Infinity,
                }
            }))
        }
        _ => Err(Error::NoConstructorRegistered {
            id: id.to_string(),
        }),
    }
}

/// The Möbius/elliptic data behind the E12 exact solution.
pub struct E12Pipeline {
    /// Modulus of the parametrization.
    pub k: Cx,
    /// Lattice step in the sn argument.
    pub eps: Cx,
    /// Canonical-form coefficients (A, B).
    pub qrt_params: SymmetricQRTParams,
    /// w ↦ α(w − 1)/(w + 1), mapping canonical samples back to f.
    pub s_map: MobiusMap,
    /// α with α⁴ = κ².
    pub alpha: Cx,
}

impl E12Pipeline {
    pub fn build(kappa: Cx) -> Result<Self> {
        let one = c(1.0);
        let k2 = kappa * kappa;
        if k2.norm() < EXCL_TOL || (k2 - one).norm() < EXCL_TOL {
            return Err(reject(EquationId::E12, "kappa^2 ∉ {0, 1}"));
        }
        // α⁴ = κ₂² = κ² (with the rescale constant κ₁ = 1) and β = 1, so the
        // transformed curve is exactly canonical: A = β² = 1 and
        // B = 2(α² + 1)/(α² − 1).
        let alpha = k2.sqrt().sqrt();
        let a2 = alpha * alpha;
        if (a2 - one).norm() < 1e-12 {
            return Err(reject(EquationId::E12, "alpha^2 ≠ 1"));
        }
        let qrt_params = SymmetricQRTParams::new(one, (a2 + one) / (a2 - one) * 2.0)?;
        let (k, eps) = parametrize_symmetric(&qrt_params)?;
        let s_map = MobiusMap::new(alpha, -alpha, one, one)?;
        Ok(E12Pipeline {
            k,
            eps,
            qrt_params,
            s_map,
            alpha,
        })
    }
}

/// Registry metadata for solutions the catalog records but does not
/// construct.
#[derive(Debug, Clone, Serialize)]
pub struct SolutionNote {
    /// Jacobi modulus of the necessary solution form.
    pub modulus: Cx,
    /// The squared multiplier φ'(z₀+1)²/φ'(z₀)² forced at lattice zeros.
    pub multiplier_ratio: Cx,
    pub description: &'static str,
}

/// E19 solutions are Jacobi elliptic functions composed with entire
/// functions; only the necessary form is recorded (modulus 1/δ² and the
/// multiplier relation), not a constructor.
pub fn solution_note(id: EquationId, params: &Params) -> Option<SolutionNote> {
    match id {
        EquationId::E19 => {
            let delta = params.get("delta")?;
            let one = c(1.0);
            let d4 = delta.powu(4);
            Some(SolutionNote {
                modulus: one / (delta * delta),
                multiplier_ratio: (one + delta).powu(4) / d4 / 2.0,
                description:
                    "necessary form f = sn(phi(z), 1/delta^2) with phi entire; \
                     phi'(z0+1)^2 = (1/2)(1+delta)^4/delta^4 * phi'(z0)^2 at lattice zeros",
            })
        }
        _ => None,
    }
}

/// JSON document for one materialized equation, following the catalog
/// schema: id, n, params as [re, im] pairs, constraint names, curve or null.
pub fn equation_to_json(eq: &CanonicalEquation) -> serde_json::Value {
    let params: BTreeMap<String, [f64; 2]> = eq
        .params
        .iter()
        .map(|(k, v)| (k.clone(), [v.re, v.im]))
        .collect();
    let info = registry()
        .into_iter()
        .find(|e| e.id == eq.id.to_string())
        .expect("registered id");
    let curve = associated_curve(eq.id, &eq.params).ok().map(|(c, kind)| {
        let m: Vec<Vec<[f64; 2]>> = c
            .matrix()
            .iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        serde_json::json!({ "matrix": m, "kind": match kind {
            CurveKind::SelfCurve => "self",
            CurveKind::HChain => "h_chain",
        }})
    });
    serde_json::json!({
        "id": eq.id.to_string(),
        "n": eq.n,
        "params": params,
        "constraints": info.constraints,
        "curve": curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::testutil::*;

    pub(crate) fn params_of(pairs: &[(&str, Cx)]) -> Params {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect()
    }

    fn eta23() -> Cx {
        Cx::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)
    }

    #[test]
    fn registry_has_thirteen_entries() {
        assert_eq!(registry().len(), 13);
        assert_eq!(EquationId::ALL.len(), 13);
    }

    #[test]
    fn e14_accepts_cube_root_rejects_one() {
        let ok = catalog_get(EquationId::E14, &params_of(&[("eta", eta23())]));
        assert!(ok.is_ok());
        let bad = catalog_get(EquationId::E14, &params_of(&[("eta", cx(1.0, 0.0))]));
        assert!(matches!(bad, Err(Error::ConstraintViolation { .. })));
    }

    #[test]
    fn e12_excludes_kappa_0_1() {
        assert!(catalog_get(EquationId::E12, &params_of(&[("kappa", cx(2.0, 0.0))])).is_ok());
        for bad in [0.0, 1.0, -1.0] {
            let r = catalog_get(EquationId::E12, &params_of(&[("kappa", cx(bad, 0.0))]));
            assert!(matches!(r, Err(Error::ConstraintViolation { .. })), "{bad}");
        }
    }

    // δ = 1 satisfies the septic constraint exactly but stays excluded.
    #[test]
    fn e19_delta_one_rejected_despite_zero_residual() {
        let p = params_of(&[("delta", cx(1.0, 0.0))]);
        assert!(constraint_residual(EquationId::E19, &p) < 1e-12);
        assert!(matches!(
            catalog_get(EquationId::E19, &p),
            Err(Error::ConstraintViolation { .. })
        ));
    }

    #[test]
    fn e17_constraint_residuals() {
        let s = 8.0_f64.sqrt();
        let p = params_of(&[("theta", cx(-1.0, 0.0)), ("kappa1", cx(s, 0.0))]);
        assert!(constraint_residual(EquationId::E17, &p) < 1e-12);

        // θ = 1, κ₁² = 2 + 2i√3 (quadratic-formula oracle on κ₁⁴−4κ₁²+16).
        let k1 = cx(2.0, 2.0 * 3.0_f64.sqrt()).sqrt();
        let p = params_of(&[("theta", cx(1.0, 0.0)), ("kappa1", k1)]);
        assert!(constraint_residual(EquationId::E17, &p) < 1e-12);

        let p = params_of(&[("theta", cx(-1.0, 0.0)), ("kappa1", cx(1.0, 0.0))]);
        assert!(constraint_residual(EquationId::E17, &p) > 1e-3);
    }

    #[test]
    fn solve_e17_both_theta_branches() {
        let sols = solve_constraints(EquationId::E17).unwrap();
        assert_eq!(sols.len(), 6);
        let minus: Vec<&Params> = sols
            .iter()
            .filter(|p| (p["theta"] - cx(-1.0, 0.0)).norm() < 1e-12)
            .collect();
        assert_eq!(minus.len(), 2);
        let s = 8.0_f64.sqrt();
        let mut k1s: Vec<f64> = minus.iter().map(|p| p["kappa1"].re).collect();
        k1s.sort_by(f64::total_cmp);
        assert_close_f(k1s[0], -s, 1e-10, "kappa1 = -2√2");
        assert_close_f(k1s[1], s, 1e-10, "kappa1 = +2√2");
        for p in &sols {
            assert!(constraint_residual(EquationId::E17, p) < 1e-10);
            assert!(catalog_get(EquationId::E17, p).is_ok());
        }
    }

    #[test]
    fn solve_e19_six_deflated_roots() {
        let sols = solve_constraints(EquationId::E19).unwrap();
        assert_eq!(sols.len(), 6, "six roots after deflating delta = 1");
        for p in &sols {
            let d = p["delta"];
            assert!(
                constraint_residual(EquationId::E19, p) < 1e-10,
                "constraint residual at {d}"
            );
            assert!((d - cx(1.0, 0.0)).norm() > 1e-6, "delta = 1 must be deflated");
            let eq = catalog_get(EquationId::E19, p).unwrap();
            // Leading factor of the numerator equals (1/2)(1+δ)²/(1+δ²).
            let lead = eq.r.num().leading();
            let want = (cx(1.0, 0.0) + d) * (cx(1.0, 0.0) + d)
                / ((cx(1.0, 0.0) + d * d) * 2.0);
            assert_close(lead, want, 1e-10 * (1.0 + want.norm()), "leading factor");
        }
    }

    #[test]
    fn solve_constraints_rejects_unconstrained() {
        assert!(matches!(
            solve_constraints(EquationId::E9),
            Err(Error::NoConstraint { .. })
        ));
    }

    #[test]
    fn associated_curves() {
        let (c9, kind) = associated_curve(EquationId::E9, &Params::new()).unwrap();
        assert_eq!(kind, CurveKind::SelfCurve);
        assert!(c9.residual(cx(0.6, 0.0), cx(0.8, 0.0)) < 1e-14);

        let (c12, _) =
            associated_curve(EquationId::E12, &params_of(&[("kappa", cx(2.0, 0.0))])).unwrap();
        // x²y² − x² − y² + 4 at an orbit pair of E12: f̄² = (9−4)/(9−1).
        let f = cx(3.0, 0.0);
        let fb = cx((5.0_f64 / 8.0).sqrt(), 0.0);
        assert!(c12.residual(fb, f) < 1e-12);

        let (c14, kind) =
            associated_curve(EquationId::E14, &params_of(&[("eta", eta23())])).unwrap();
        assert_eq!(kind, CurveKind::HChain);
        // Constant term is −η² under the normalization anchored at x²y².
        let eta = eta23();
        assert_close(c14.matrix()[2][2], -eta * eta, 1e-12, "constant term");

        assert!(matches!(
            associated_curve(EquationId::E10, &params_of(&[("delta", cx(0.3, 0.0))])),
            Err(Error::NoCurveRegistered { .. })
        ));
    }

    #[test]
    fn exact_e9_is_sine_family() {
        let sampler = exact_solution(EquationId::E9, &Params::new(), cx(0.0, 0.0)).unwrap();
        let want = [0.0, 1.0, 0.0, -1.0, 0.0, 1.0];
        for (z, w) in want.iter().enumerate() {
            let v = sampler(z as i64).as_finite().unwrap();
            assert_close(v, cx(*w, 0.0), 1e-12, "sine sample");
        }
        // Consecutive pairs satisfy f̄² = 1 − f² to machine precision.
        let sampler = exact_solution(EquationId::E9, &Params::new(), cx(0.3, 0.1)).unwrap();
        for z in 0..30 {
            let f = sampler(z).as_finite().unwrap();
            let fb = sampler(z + 1).as_finite().unwrap();
            assert!((fb * fb + f * f - cx(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn exact_e12_satisfies_equation() {
        let params = params_of(&[("kappa", cx(2.0, 0.0))]);
        let eq = catalog_get(EquationId::E12, &params).unwrap();
        let sampler = exact_solution(EquationId::E12, &params, cx(0.1, 0.0)).unwrap();
        let mut checked = 0;
        let mut worst = 0.0_f64;
        for z in 0..50 {
            let (f, fb) = match (sampler(z), sampler(z + 1)) {
                (Extended::Finite(a), Extended::Finite(b)) => (a, b),
                _ => continue, // pole bookkeeping: skip flagged samples
            };
            let r = match eq.r.eval(f) {
                Ok(Extended::Finite(v)) => v,
                _ => continue,
            };
            worst = worst.max((fb * fb - r).norm() / (1.0 + r.norm()));
            checked += 1;
        }
        assert!(checked >= 45, "too many flagged samples: {checked}");
        assert!(worst < 1e-7, "E12 pipeline residual {worst:.3e}");
    }

    #[test]
    fn exact_solution_unregistered() {
        assert!(matches!(
            exact_solution(EquationId::E18, &Params::new(), cx(0.0, 0.0)),
            Err(Error::NoConstructorRegistered { .. })
        ));
    }

    #[test]
    fn e19_solution_note_records_modulus() {
        let sols = solve_constraints(EquationId::E19).unwrap();
        let note = solution_note(EquationId::E19, &sols[0]).unwrap();
        let d = sols[0]["delta"];
        assert_close(note.modulus, cx(1.0, 0.0) / (d * d), 1e-14, "modulus 1/δ²");
        assert_close(
            note.multiplier_ratio,
            (cx(1.0, 0.0) + d).powu(4) / d.powu(4) / 2.0,
            1e-14,
            "multiplier",
        );
    }

    #[test]
    fn catalog_get_is_deterministic() {
        let p = params_of(&[("kappa", cx(2.0, 0.0))]);
        let a = catalog_get(EquationId::E12, &p).unwrap();
        let b = catalog_get(EquationId::E12, &p).unwrap();
        assert_eq!(a.r.num().coeffs(), b.r.num().coeffs());
        assert_eq!(a.r.den().coeffs(), b.r.den().coeffs());
    }

    #[test]
    fn json_schema_fields() {
        let eq = catalog_get(EquationId::E12, &params_of(&[("kappa", cx(2.0, 0.0))])).unwrap();
        let doc = equation_to_json(&eq);
        assert_eq!(doc["id"], "E12");
        assert_eq!(doc["n"], 2);
        assert!(doc["curve"].is_object());
        let doc = equation_to_json(
            &catalog_get(EquationId::E15, &Params::new()).unwrap(),
        );
        assert!(doc["curve"].is_null());
    }
}

//! Continuum-limit studies: the scaling t = εz applied to the difference
//! Riccati equation and to the symmetric QRT lattice, measured against
//! reference ODE integrations, with convergence-order fits.

use crate::elliptic::jacobi_sn_cn_dn;
use crate::numkit::{Cx, Extended, MobiusMap};
use crate::riccati::{canonicalize_riccati, factor_eq10_to_riccati, RiccatiCoefficients};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Trajectory magnitude treated as a blow-up.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

/// Errors below this are roundoff noise and excluded from order fits.
pub const ORDER_FIT_FLOOR: f64 = 1e-13;

/// A fixed-step RK4 trajectory with cubic-Hermite dense output.
///
/// Local accuracy is O(h⁵) per step; the Hermite reconstruction between
/// nodes is O(h⁴), matching the global error of the integrator.
#[derive(Debug, Clone)]
pub struct OdeTrajectory {
    ts: Vec<f64>,
    ys: Vec<Vec<Cx>>,
    derivs: Vec<Vec<Cx>>,
    /// True when |state| exceeded [`BLOWUP_THRESHOLD`] and the trajectory
    /// was truncated.
    pub blew_up: bool,
}

impl OdeTrajectory {
    /// Last time covered by the trajectory.
    pub fn t_end(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    pub fn t_start(&self) -> f64 {
        self.ts[0]
    }

    /// Dense evaluation by cubic Hermite interpolation on the bracketing
    /// step. `t` must lie within [t_start, t_end].
    pub fn eval(&self, t: f64) -> Option<Vec<Cx>> {
        if t < self.t_start() - 1e-12 || t > self.t_end() + 1e-12 {
            return None;
        }
        let idx = match self
            .ts
            .binary_search_by(|probe| probe.partial_cmp(&t).unwrap())
        {
            Ok(i) => return Some(self.ys[i].clone()),
            Err(i) => i.clamp(1, self.ts.len() - 1) - 1,
        };
        let (t0, t1) = (self.ts[idx], self.ts[idx + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let dim = self.ys[idx].len();
        Some(
            (0..dim)
                .map(|i| {
                    self.ys[idx][i] * h00
                        + self.derivs[idx][i] * (h10 * h)
                        + self.ys[idx + 1][i] * h01
                        + self.derivs[idx + 1][i] * (h11 * h)
                })
                .collect(),
        )
    }
}

fn state_norm(y: &[Cx]) -> f64 {
    y.iter().map(|z| z.norm()).fold(0.0_f64, f64::max)
}

/// Classical fixed-step RK4 from (t0, y0) to t_end. Truncates with a
/// blow-up flag once the state magnitude passes [`BLOWUP_THRESHOLD`].
pub fn ode_solve<F>(field: F, t0: f64, y0: &[Cx], t_end: f64, h: f64) -> OdeTrajectory
where
    F: Fn(f64, &[Cx]) -> Vec<Cx>,
{
    assert!(h > 0.0, "step size must be positive");
    let steps = ((t_end - t0) / h).ceil().max(1.0) as usize;
    let h = (t_end - t0) / steps as f64;
    let mut ts = vec![t0];
    let mut ys = vec![y0.to_vec()];
    let mut derivs = vec![field(t0, y0)];
    let mut blew_up = false;

    let add = |a: &[Cx], b: &[Cx], s: f64| -> Vec<Cx> {
        a.iter().zip(b).map(|(x, y)| x + y * s).collect()
    };

    for step in 0..steps {
        let t = t0 + step as f64 * h;
        let y = ys.last().unwrap().clone();
        let k1 = field(t, &y);
        // Blow-up also manifests as a step the fixed grid cannot resolve:
        // the state would change by more than half its own magnitude.
        if state_norm(&k1) * h > 0.5 * (1.0 + state_norm(&y)) {
            blew_up = true;
            break;
        }
        let k2 = field(t + h / 2.0, &add(&y, &k1, h / 2.0));
        let k3 = field(t + h / 2.0, &add(&y, &k2, h / 2.0));
        let k4 = field(t + h, &add(&y, &k3, h));
        let mut next = y.clone();
        for i in 0..next.len() {
            next[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
        let finite = next
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite || state_norm(&next) > BLOWUP_THRESHOLD {
            blew_up = true;
            break;
        }
        let tn = t + h;
        derivs.push(field(tn, &next));
        ts.push(tn);
        ys.push(next);
    }
    OdeTrajectory {
        ts,
        ys,
        derivs,
        blew_up,
    }
}

/// Least-squares slope of log(error) against log(eps), skipping entries at
/// the roundoff floor. Returns 0.0 when fewer than two entries survive.
pub fn fit_order(eps_list: &[f64], errors: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = eps_list
        .iter()
        .zip(errors)
        .filter(|(_, e)| **e > ORDER_FIT_FLOOR)
        .map(|(x, e)| (x.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Result of one discrete-vs-ODE comparison across a list of ε values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitStudy {
    /// Strictly decreasing ε values.
    pub eps_list: Vec<f64>,
    /// Sup-norm error over the lattice window, one entry per ε.
    pub errors: Vec<f64>,
    /// Least-squares slope of log error vs log ε above the noise floor.
    pub fitted_order: f64,
    /// Time window (t0, T) of the comparison.
    pub window: (f64, f64),
    /// Per-ε flags for discrete poles or ambiguous steps.
    pub flagged: Vec<bool>,
}

impl LimitStudy {
    fn assemble(eps_list: Vec<f64>, errors: Vec<f64>, window: (f64, f64), flagged: Vec<bool>) -> Self {
        let fitted_order = fit_order(&eps_list, &errors);
        LimitStudy {
            eps_list,
            errors,
            fitted_order,
            window,
            flagged,
        }
    }

    /// Two-column CSV (eps, error).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,error\n");
        for (e, err) in self.eps_list.iter().zip(&self.errors) {
            out.push_str(&format!("{e:.16e},{err:.16e}\n"));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema_version": "1",
            "eps": self.eps_list,
            "errors": self.errors,
            "fitted_order": self.fitted_order,
            "window": { "t0": self.window.0, "t_max": self.window.1 },
            "flagged": self.flagged,
        })
    }
}

fn validate_eps(eps_list: &[f64]) -> Result<()> {
    if eps_list.is_empty() {
        return Err(Error::InvalidStudy("empty eps list".into()));
    }
    for w in eps_list.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::InvalidStudy(
                "eps list must be strictly decreasing".into(),
            ));
        }
    }
    if eps_list.iter().any(|e| *e <= 0.0) {
        return Err(Error::InvalidStudy("eps values must be positive".into()));
    }
    Ok(())
}

fn reference_step(t_total: f64) -> f64 {
    (t_total / 4096.0).min(1e-3)
}

/// Discrete Riccati scheme w ↦ (w + εÃ)/(1 − εw) against the ODE
/// w' = w² + Ã, compared at lattice times over [0, T].
///
/// For Ã = 0 the scheme telescopes to w_m = w₀/(1 − w₀mε), which is the
/// ODE solution exactly, so every error sits at the roundoff floor.
pub fn riccati_limit_study(
    a_tilde: Cx,
    w0: Cx,
    t_max: f64,
    eps_list: &[f64],
) -> Result<LimitStudy> {
    validate_eps(eps_list)?;
    if t_max <= 0.0 {
        return Err(Error::InvalidStudy("window must be positive".into()));
    }
    let overhang = t_max + eps_list[0] + 1e-9;
    let reference = ode_solve(
        |_, y| vec![y[0] * y[0] + a_tilde],
        0.0,
        &[w0],
        overhang,
        reference_step(overhang),
    );
    if reference.blew_up {
        return Err(Error::BlowUpInWindow(reference.t_end()));
    }

    let mut errors = Vec::new();
    let mut flagged = Vec::new();
    for &eps in eps_list {
        let steps = (t_max / eps).ceil() as usize;
        let mut w = w0;
        let mut sup = 0.0_f64;
        let mut flag = false;
        for m in 1..=steps {
            let den = Cx::new(1.0, 0.0) - w * eps;
            if den.norm() <= 1e-12 * (1.0 + (w * eps).norm()) {
                flag = true;
                break;
            }
            w = (w + a_tilde * eps) / den;
            let t = m as f64 * eps;
            let reference_w = reference.eval(t).expect("inside window")[0];
            sup = sup.max((w - reference_w).norm());
        }
        errors.push(sup);
        flagged.push(flag);
    }
    Ok(LimitStudy::assemble(
        eps_list.to_vec(),
        errors,
        (0.0, t_max),
        flagged,
    ))
}

/// Output of [`qrt_limit_study`]: the integrator comparison plus the
/// per-ε residual of the scaled lattice relation
/// (w(t+ε) − w(t))²/sn²ε = k²w̄²w² + ((2 cnε dnε − 2)/sn²ε)·w̄w + 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QrtLimitStudy {
    pub study: LimitStudy,
    pub relation_residuals: Vec<f64>,
}

/// The coefficient (2 cn ε dn ε − 2)/sn²ε, which tends to −(1 + k²) as
/// ε → 0.
pub fn qrt_coefficient(k: Cx, eps: f64) -> Result<Cx> {
    let (s, c, d) = jacobi_sn_cn_dn(Cx::new(eps, 0.0), k)?;
    Ok((c * d * 2.0 - Cx::new(2.0, 0.0)) / (s * s))
}

/// Compare the exact lattice samples w(t_m, ε) = sn(t_m + C₀, k) (which
/// solve the scaled relation identically) against an RK4 integration of
/// (w')² = (k²w² − 1)(w² − 1) driven in the system form
/// (sn, cn, dn)' = (cn·dn, −sn·dn, −k²·sn·cn).
///
/// The reported errors therefore measure the ODE integrator alone.
pub fn qrt_limit_study(k: Cx, eps_list: &[f64], t_max: f64, c0: Cx) -> Result<QrtLimitStudy> {
    validate_eps(eps_list)?;
    let (s0, c0v, d0) = jacobi_sn_cn_dn(c0, k)?;
    let overhang = t_max + eps_list[0] + 1e-9;
    let reference = ode_solve(
        |_, y| vec![y[1] * y[2], -y[0] * y[2], -k * k * y[0] * y[1]],
        0.0,
        &[s0, c0v, d0],
        overhang,
        reference_step(overhang),
    );
    if reference.blew_up {
        return Err(Error::BlowUpInWindow(reference.t_end()));
    }

    let mut errors = Vec::new();
    let mut residuals = Vec::new();
    let mut flagged = Vec::new();
    let one = Cx::new(1.0, 0.0);
    for &eps in eps_list {
        let (se, ce, de) = jacobi_sn_cn_dn(Cx::new(eps, 0.0), k)?;
        let sn2 = se * se;
        if sn2.norm() < 1e-20 {
            return Err(Error::InvalidStudy("sn ε vanishes".into()));
        }
        let coeff = (ce * de * 2.0 - one * 2.0) / sn2;
        let steps = (t_max / eps).ceil() as usize;
        let mut sup = 0.0_f64;
        let mut res = 0.0_f64;
        for m in 0..=steps {
            let t = m as f64 * eps;
            let (w, _, _) = jacobi_sn_cn_dn(Cx::new(t, 0.0) + c0, k)?;
            let (wn, _, _) = jacobi_sn_cn_dn(Cx::new(t + eps, 0.0) + c0, k)?;
            let lhs = (wn - w) * (wn - w) / sn2;
            let rhs = k * k * wn * wn * w * w + coeff * wn * w + one;
            res = res.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
            let reference_w = reference.eval(t).expect("inside window")[0];
            sup = sup.max((w - reference_w).norm());
        }
        errors.push(sup);
        residuals.push(res);
        flagged.push(false);
    }
    Ok(QrtLimitStudy {
        study: LimitStudy::assemble(eps_list.to_vec(), errors, (0.0, t_max), flagged),
        relation_residuals: residuals,
    })
}

/// Convergence order of the RK4 reference against the sn oracle: errors at
/// each step size in `h_list` are fitted just like a limit study.
pub fn rk_reference_order(k: Cx, c0: Cx, t_max: f64, h_list: &[f64]) -> Result<f64> {
    let (s0, c0v, d0) = jacobi_sn_cn_dn(c0, k)?;
    let mut errors = Vec::new();
    for &h in h_list {
        let traj = ode_solve(
            |_, y| vec![y[1] * y[2], -y[0] * y[2], -k * k * y[0] * y[1]],
            0.0,
            &[s0, c0v, d0],
            t_max,
            h,
        );
        if traj.blew_up {
            return Err(Error::BlowUpInWindow(traj.t_end()));
        }
        let mut sup = 0.0_f64;
        let samples = 64usize;
        for m in 0..=samples {
            let t = t_max * m as f64 / samples as f64;
            let (want, _, _) = jacobi_sn_cn_dn(Cx::new(t, 0.0) + c0, k)?;
            let got = traj.eval(t).expect("inside window")[0];
            sup = sup.max((got - want).norm());
        }
        errors.push(sup);
    }
    Ok(fit_order(h_list, &errors))
}

/// Sign-of-the-square-root alignment used by the first-order integration of
/// (w')² equations: pick ±√(rhs) closest to the previous derivative; when
/// rhs sits at a simple turning point the continuation flips through zero
/// automatically because both candidates are tiny.
fn aligned_sqrt(rhs: Cx, reference: Cx) -> Cx {
    let root = rhs.sqrt();
    if (root - reference).norm() <= (-root - reference).norm() {
        root
    } else {
        -root
    }
}

/// Integrate (w')² = c(w² − d) in first-order form w' = s·√(c(w² − d)),
/// the sign tracked by derivative continuity from the principal initial
/// branch.
fn integrate_sqrt_ode(c: Cx, d: Cx, w0: Cx, t_max: f64, h: f64) -> OdeTrajectory {
    // Snap roundoff-level right-hand sides to zero: an exact equilibrium
    // (w² = d) must stay put instead of escaping along √(roundoff).
    let scale = 1.0 + c.norm() * (w0.norm_sqr() + d.norm());
    let rhs_of = move |w: Cx| {
        let rhs = c * (w * w - d);
        if rhs.norm() <= 1e-14 * scale {
            Cx::new(0.0, 0.0)
        } else {
            rhs
        }
    };
    let steps = (t_max / h).ceil().max(1.0) as usize;
    let h = t_max / steps as f64;
    let mut ts = vec![0.0];
    let mut ys = vec![vec![w0]];
    let mut deriv_ref = rhs_of(w0).sqrt();
    let mut derivs = vec![vec![deriv_ref]];
    let mut blew_up = false;
    for step in 0..steps {
        let w = ys.last().unwrap()[0];
        let f = |wv: Cx| aligned_sqrt(rhs_of(wv), deriv_ref);
        let k1 = f(w);
        let k2 = f(w + k1 * (h / 2.0));
        let k3 = f(w + k2 * (h / 2.0));
        let k4 = f(w + k3 * h);
        let next = w + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if !(next.re.is_finite() && next.im.is_finite()) || next.norm() > BLOWUP_THRESHOLD {
            blew_up = true;
            break;
        }
        deriv_ref = aligned_sqrt(rhs_of(next), k4);
        ts.push((step + 1) as f64 * h);
        ys.push(vec![next]);
        derivs.push(vec![deriv_ref]);
    }
    OdeTrajectory {
        ts,
        ys,
        derivs,
        blew_up,
    }
}

/// Degenerate lattice relation (w̄ − w)² = ε²c(w̄w − d) iterated with the
/// root nearest a linear prediction, against the ODE (w')² = c(w² − d).
///
/// Root selection: the quadratic in w̄ has two roots that straddle w at
/// distance O(ε), so "nearest the previous value" cannot separate them;
/// the tie is broken by extrapolating the previous increment
/// (first step: the principal square-root branch).
pub fn degenerate_limit_study(
    c: Cx,
    d: Cx,
    w0: Cx,
    t_max: f64,
    eps_list: &[f64],
) -> Result<LimitStudy> {
    validate_eps(eps_list)?;
    if c.norm() < 1e-14 {
        return Err(Error::InvalidStudy("c = -a·tau2^2 must be nonzero".into()));
    }
    let overhang = t_max + eps_list[0] + 1e-9;
    let reference = integrate_sqrt_ode(c, d, w0, overhang, reference_step(overhang));
    if reference.blew_up {
        return Err(Error::BlowUpInWindow(reference.t_end()));
    }

    let one = Cx::new(1.0, 0.0);
    let mut errors = Vec::new();
    let mut flagged = Vec::new();
    for &eps in eps_list {
        let steps = (t_max / eps).ceil() as usize;
        let e2c = c * (eps * eps);
        let mut w = w0;
        let mut prev: Option<Cx> = None;
        let mut sup = 0.0_f64;
        let mut flag = false;
        for m in 1..=steps {
            // w̄² − (2 + ε²c)·w·w̄ + (w² + ε²c·d) = 0.
            let b = (one * 2.0 + e2c) * w;
            let cc = w * w + e2c * d;
            let disc = (b * b - cc * 4.0).sqrt();
            let (r1, r2) = ((b + disc) / 2.0, (b - disc) / 2.0);
            let prediction = match prev {
                Some(p) => w * 2.0 - p,
                // First step: forward along the principal square-root branch,
                // matching the reference integration's initial derivative.
                None => w + (c * (w * w - d)).sqrt() * eps,
            };
            let (d1, d2) = ((r1 - prediction).norm(), (r2 - prediction).norm());
            if (d1 - d2).abs() <= 1e-12 * (d1 + d2 + 1.0) && (r1 - r2).norm() > 1e-12 {
                flag = true;
            }
            let next = if d1 <= d2 { r1 } else { r2 };
            prev = Some(w);
            w = next;
            let t = m as f64 * eps;
            let reference_w = reference.eval(t).expect("inside window")[0];
            sup = sup.max((w - reference_w).norm());
        }
        errors.push(sup);
        flagged.push(flag);
    }
    Ok(LimitStudy::assemble(
        eps_list.to_vec(),
        errors,
        (0.0, t_max),
        flagged,
    ))
}

/// Output of the E10 continuum pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Eq10LimitStudy {
    /// Canonical Riccati coefficient of the worked factor.
    pub a: Cx,
    /// The γ-map that was canonicalized.
    pub coeffs: RiccatiCoefficients,
    /// Canonical-coordinate image of γ₀ used as the study start value.
    pub w0: Cx,
    pub study: LimitStudy,
}

/// Continuum limit of equation E10 through its Riccati factorization: take
/// the worked γ-map (sign +1, θ = +1), canonicalize it to
/// γ̄ − γ = γ̄γ + A, map γ₀ into the canonical coordinate, and run
/// [`riccati_limit_study`] with that A. Requires constant δ with 2δ² ≠ 1.
pub fn riccati_limit_eq10(
    delta: Cx,
    gamma0: Cx,
    t_max: f64,
    eps_list: &[f64],
) -> Result<Eq10LimitStudy> {
    let one = Cx::new(1.0, 0.0);
    if (delta * delta * 2.0 - one).norm() < 1e-9 {
        return Err(Error::InvalidParameter("2·delta^2 = 1 is excluded".into()));
    }
    let factors = factor_eq10_to_riccati(delta)?;
    let worked = factors
        .iter()
        .find(|f| f.sign == 1 && f.theta == 1)
        .expect("worked factor present");
    let (a, t) = canonicalize_riccati(&worked.coeffs)?;
    let w0 = match t.inverse().apply_cx(gamma0) {
        Extended::Finite(w) => w,
        Extended::Infinity => {
            return Err(Error::InvalidParameter(
                "gamma0 maps to infinity in canonical coordinates".into(),
            ))
        }
    };
    let study = riccati_limit_study(a, w0, t_max, eps_list)?;
    Ok(Eq10LimitStudy {
        a,
        coeffs: worked.coeffs,
        w0,
        study,
    })
}

/// Inverse of the canonicalizing substitution, exposed for tests.
pub fn canonical_coordinate(t: &MobiusMap, gamma: Cx) -> Extended {
    t.inverse().apply_cx(gamma)
}

//! Biquadratic curves and the QRT family: symmetric and general steps,
//! the conserved quantity K, Möbius actions on curves, the Jacobi-elliptic
//! parametrization of the symmetric canonical form, and least-squares curve
//! fitting from orbit data.
//!
//! A biquadratic relation is written v(x)ᵀ C v(y) = 0 with v(x) = (x², x, 1),
//! so C is a 3×3 complex matrix. In the symmetric canonical form
//!
//! ```text
//! x²y² + A(x² + y²) + 2Bxy + 1 = 0
//! ```
//!
//! the curve is parametrized by x = k^{1/2} sn(u, k), y = k^{1/2} sn(u+ε, k)
//! with A = −1/(k sn²ε) and B = cn ε dn ε/(k sn²ε), which forces
//! k + 1/k = (B² − A² − 1)/A.

// Index loops mirror the v(x)ᵀ C v(y) matrix notation.
#![allow(clippy::needless_range_loop)]

use crate::elliptic::{complete_k, jacobi_sn_cn_dn, sn_inverse};
use crate::numkit::{Cx, Extended, MobiusMap};
use crate::orbit::Orbit;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Magnitude above which an orbit sample counts as a pole hit.
pub const POLE_THRESHOLD: f64 = 1e10;

type Mat3 = [[Cx; 3]; 3];

fn v_of(x: Cx) -> [Cx; 3] {
    [x * x, x, Cx::new(1.0, 0.0)]
}

fn mat_scale(m: &Mat3) -> f64 {
    m.iter()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0_f64, f64::max)
}

/// A biquadratic curve v(x)ᵀ C v(y) = 0, stored with its largest-magnitude
/// entry normalized to 1 so comparisons are deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Biquadratic {
    c: Mat3,
}

impl Biquadratic {
    pub fn new(c: Mat3) -> Result<Self> {
        let max = mat_scale(&c);
        if max == 0.0 {
            return Err(Error::InvalidParameter("zero biquadratic matrix".into()));
        }
        // Deterministic anchor: first entry (row-major) achieving the max.
        let mut anchor = Cx::new(1.0, 0.0);
        'outer: for row in &c {
            for e in row {
                if e.norm() >= max * (1.0 - 1e-15) {
                    anchor = *e;
                    break 'outer;
                }
            }
        }
        let mut out = c;
        for row in out.iter_mut() {
            for e in row.iter_mut() {
                *e /= anchor;
            }
        }
        Ok(Biquadratic { c: out })
    }

    pub(crate) fn from_matrix_unnormalized(c: Mat3) -> Self {
        Biquadratic { c }
    }

    /// Canonical symmetric form x²y² + A(x² + y²) + 2Bxy + 1 = 0.
    pub fn canonical_symmetric(a: Cx, b: Cx) -> Result<Self> {
        let z = Cx::new(0.0, 0.0);
        let one = Cx::new(1.0, 0.0);
        Biquadratic::new([[one, z, a], [z, b * 2.0, z], [a, z, one]])
    }

    /// The circle relation x² + y² − 1 = 0.
    pub fn circle() -> Self {
        let z = Cx::new(0.0, 0.0);
        let one = Cx::new(1.0, 0.0);
        Biquadratic::new([[z, z, one], [z, z, z], [one, z, -one]]).unwrap()
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.c
    }

    pub fn is_symmetric(&self) -> bool {
        let tol = 1e-12 * mat_scale(&self.c).max(1.0);
        for i in 0..3 {
            for j in 0..3 {
                if (self.c[i][j] - self.c[j][i]).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// v(x)ᵀ C v(y); zero within tolerance means (x, y) lies on the curve.
    pub fn eval(&self, x: Cx, y: Cx) -> Cx {
        let vx = v_of(x);
        let vy = v_of(y);
        let mut acc = Cx::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                acc += vx[i] * self.c[i][j] * vy[j];
            }
        }
        acc
    }

    /// Σ |C_ij||v(x)_i||v(y)_j|, the natural scale for relative residuals.
    pub fn eval_scale(&self, x: Cx, y: Cx) -> f64 {
        let vx = v_of(x);
        let vy = v_of(y);
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += vx[i].norm() * self.c[i][j].norm() * vy[j].norm();
            }
        }
        acc.max(1e-300)
    }

    /// Relative residual of a point against the curve.
    pub fn residual(&self, x: Cx, y: Cx) -> f64 {
        self.eval(x, y).norm() / self.eval_scale(x, y)
    }

    /// The quadratic slice a(y)x² + b(y)x + c(y) obtained by fixing y.
    pub fn slice_in_x(&self, y: Cx) -> (Cx, Cx, Cx) {
        let vy = v_of(y);
        let dot = |row: &[Cx; 3]| row[0] * vy[0] + row[1] * vy[1] + row[2] * vy[2];
        (dot(&self.c[0]), dot(&self.c[1]), dot(&self.c[2]))
    }

    /// Cosine distance between coefficient 9-vectors (scale and global
    /// phase invariant).
    pub fn cosine_distance(&self, other: &Biquadratic) -> f64 {
        let a: Vec<Cx> = self.c.iter().flatten().copied().collect();
        let b: Vec<Cx> = other.c.iter().flatten().copied().collect();
        let na: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let dot: Cx = a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum();
        1.0 - dot.norm() / (na * nb)
    }
}

/// A pencil C₀ + K·C₁ of biquadratic curves; the two matrices must be
/// linearly independent as 9-vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QRTPencil {
    pub c0: Mat3,
    pub c1: Mat3,
}

impl QRTPencil {
    pub fn new(c0: Mat3, c1: Mat3) -> Result<Self> {
        let a: Vec<Cx> = c0.iter().flatten().copied().collect();
        let b: Vec<Cx> = c1.iter().flatten().copied().collect();
        let na: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            return Err(Error::DegeneratePencil);
        }
        let dot: Cx = a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum();
        let cos = (dot.norm() / (na * nb)).min(1.0);
        // Smallest principal angle between the two coefficient lines.
        if (1.0 - cos * cos).max(0.0).sqrt() <= 1e-10 {
            return Err(Error::DegeneratePencil);
        }
        Ok(QRTPencil { c0, c1 })
    }

    fn apply(m: &Mat3, v: &[Cx; 3]) -> [Cx; 3] {
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    fn apply_t(m: &Mat3, v: &[Cx; 3]) -> [Cx; 3] {
        [
            m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
            m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
            m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2],
        ]
    }

    /// (f₁, f₂, f₃)(x) = (C₀ v(x)) × (C₁ v(x)).
    pub fn f_triple(&self, x: Cx) -> [Cx; 3] {
        let v = v_of(x);
        cross(&Self::apply(&self.c0, &v), &Self::apply(&self.c1, &v))
    }

    /// (g₁, g₂, g₃)(x) = (C₀ᵀ v(x)) × (C₁ᵀ v(x)).
    pub fn g_triple(&self, x: Cx) -> [Cx; 3] {
        let v = v_of(x);
        cross(&Self::apply_t(&self.c0, &v), &Self::apply_t(&self.c1, &v))
    }
}

fn cross(a: &[Cx; 3], b: &[Cx; 3]) -> [Cx; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Coefficients of the symmetric canonical form; A must be nonzero for the
/// elliptic parametrization to exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricQRTParams {
    pub a: Cx,
    pub b: Cx,
}

impl SymmetricQRTParams {
    pub fn new(a: Cx, b: Cx) -> Result<Self> {
        if a.norm() < 1e-14 {
            return Err(Error::InvalidParameter(
                "A = 0 is excluded by the parametrization".into(),
            ));
        }
        Ok(SymmetricQRTParams { a, b })
    }
}

/// One symmetric QRT move: given consecutive values (w_prev, w_cur) on the
/// curve, return the second root of the quadratic slice at y = w_cur.
///
/// The root-sum form −b/a − w_prev is used by default; when it suffers
/// cancellation against a large w_prev the root-product form c/(a·w_prev)
/// takes over.
pub fn qrt_step_symmetric(curve: &Biquadratic, w_prev: Cx, w_cur: Cx) -> Result<Cx> {
    if !curve.is_symmetric() {
        return Err(Error::InvalidParameter(
            "qrt_step_symmetric requires a symmetric curve".into(),
        ));
    }
    let res = curve.residual(w_prev, w_cur);
    if res > 1e-8 {
        return Err(Error::PointOffCurve(res));
    }
    let (a, b, c) = curve.slice_in_x(w_cur);
    let scale = [a, b, c].iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if scale < 1e-14 * mat_scale(curve.matrix()) * (1.0 + w_cur.norm_sqr()) {
        return Err(Error::DegenerateFiber);
    }
    if a.norm() <= 1e-12 * scale {
        // Linear slice: the fiber holds a single partner point.
        if b.norm() <= 1e-12 * scale {
            return Err(Error::DegenerateFiber);
        }
        return Ok(-c / b);
    }
    let sum_form = -b / a - w_prev;
    if w_prev.norm() > 10.0 * sum_form.norm() && w_prev.norm() > 0.0 {
        Ok(c / (a * w_prev))
    } else {
        Ok(sum_form)
    }
}

/// One full QRT step (x, y) ↦ (x̄, ȳ) for a general pencil.
pub fn qrt_step_general(pencil: &QRTPencil, x: Cx, y: Cx) -> Result<(Cx, Cx)> {
    let f = pencil.f_triple(y);
    let fx_scale = f.iter().map(|z| z.norm()).fold(0.0_f64, f64::max) * (1.0 + x.norm());
    let den_x = f[1] - x * f[2];
    if den_x.norm() <= 1e-12 * fx_scale.max(1e-300) {
        return Err(Error::StepSingularity);
    }
    let x_next = (f[0] - x * f[1]) / den_x;

    let g = pencil.g_triple(x_next);
    let gy_scale = g.iter().map(|z| z.norm()).fold(0.0_f64, f64::max) * (1.0 + y.norm());
    let den_y = g[1] - y * g[2];
    if den_y.norm() <= 1e-12 * gy_scale.max(1e-300) {
        return Err(Error::StepSingularity);
    }
    let y_next = (g[0] - y * g[1]) / den_y;
    Ok((x_next, y_next))
}

/// The conserved quantity K = −(v(x)ᵀ C₀ v(y)) / (v(x)ᵀ C₁ v(y)).
pub fn qrt_invariant(pencil: &QRTPencil, x: Cx, y: Cx) -> Result<Cx> {
    let b0 = Biquadratic::from_matrix_unnormalized(pencil.c0);
    let b1 = Biquadratic::from_matrix_unnormalized(pencil.c1);
    let num = b0.eval(x, y);
    let den = b1.eval(x, y);
    if den.norm() <= 1e-13 * b1.eval_scale(x, y) {
        return Err(Error::InvariantPole);
    }
    Ok(-num / den)
}

/// Forward map of the parametrization: (k, ε) ↦ (A, B) with
/// A = −1/(k sn²ε) and B = cn ε dn ε / (k sn²ε).
pub fn symmetric_params_from(k: Cx, eps: Cx) -> Result<SymmetricQRTParams> {
    let (s, c, d) = jacobi_sn_cn_dn(eps, k)?;
    let ks2 = k * s * s;
    if ks2.norm() < 1e-14 {
        return Err(Error::InvalidParameter("k·sn²ε = 0".into()));
    }
    SymmetricQRTParams::new(-Cx::new(1.0, 0.0) / ks2, c * d / ks2)
}

/// Recover (k, ε) from (A, B).
///
/// k solves k² − ((B² − A² − 1)/A)·k + 1 = 0 and the root with |k| ≤ 1 is
/// chosen (the reciprocal pair is accepted by round-trip tests). ε solves
/// sn²(ε, k) = −1/(kA); among the Newton solution ε₀ and its reflection
/// 2K − ε₀ (which flips the sign of cn·dn), the branch with
/// cn ε dn ε / (k sn²ε) = B within 1e−8 is returned.
pub fn parametrize_symmetric(params: &SymmetricQRTParams) -> Result<(Cx, Cx)> {
    let one = Cx::new(1.0, 0.0);
    let (a, b) = (params.a, params.b);
    let q = (b * b - a * a - one) / a;
    let disc = (q * q - one * 4.0).sqrt();
    let roots = [(q + disc) / 2.0, (q - disc) / 2.0];
    let k = if roots[0].norm() <= roots[1].norm() {
        roots[0]
    } else {
        roots[1]
    };
    if k.norm() < 1e-14 {
        return Err(Error::ParametrizationFailure);
    }

    let target_sn2 = -one / (k * a);
    let w = target_sn2.sqrt();
    let big_k = complete_k(k)?;

    // Newton from a spread of deterministic starting guesses.
    let guesses = [
        w.asin(),
        w.asin() + big_k * 0.5,
        Cx::new(0.5, 0.0),
        Cx::new(0.5, 0.5),
        Cx::new(0.2, -0.6),
        big_k * 0.5,
    ];
    let mut eps0 = None;
    for g in guesses {
        if let Ok(u) = sn_inverse(w, k, g) {
            eps0 = Some(u);
            break;
        }
    }
    let eps0 = eps0.ok_or(Error::ParametrizationFailure)?;

    for cand in [eps0, big_k * 2.0 - eps0] {
        let (s, c, d) = jacobi_sn_cn_dn(cand, k)?;
        let bb = c * d / (k * s * s);
        if (bb - b).norm() <= 1e-8 * (1.0 + b.norm()) {
            return Ok((k, cand));
        }
    }
    Err(Error::ParametrizationFailure)
}

/// The exact solution samples f_m = k^{1/2} sn(ε·m + C₀, k), m = 0..m_count−1,
/// with pole-proximate entries flagged infinite.
pub fn exact_symmetric_orbit(k: Cx, eps: Cx, c0: Cx, m_count: usize) -> Result<Orbit> {
    let sqrt_k = k.sqrt();
    let mut values = Vec::with_capacity(m_count);
    for m in 0..m_count {
        let u = eps * (m as f64) + c0;
        let (s, _, _) = jacobi_sn_cn_dn(u, k)?;
        values.push(Extended::from_raw(sqrt_k * s, POLE_THRESHOLD));
    }
    Ok(Orbit::from_samples(values))
}

/// Degree-2 symmetric-square action of a Möbius map on v(x): the matrix L
/// with L·v(x) ∝ ((ax+b)², (ax+b)(cx+d), (cx+d)²).
fn sym_square(t: &MobiusMap) -> Mat3 {
    let (a, b, c, d) = (t.a, t.b, t.c, t.d);
    [
        [a * a, a * b * 2.0, b * b],
        [a * c, a * d + b * c, b * d],
        [c * c, c * d * 2.0, d * d],
    ]
}

/// Transform a curve by Möbius maps in each slot: the returned C' satisfies
/// v(x)ᵀ C' v(y) ∝ (denominator-cleared) v(T_x(x))ᵀ C v(T_y(y)).
///
/// Symmetry is preserved when T_x = T_y and C is symmetric.
pub fn mobius_transform_biquadratic(
    curve: &Biquadratic,
    t_x: &MobiusMap,
    t_y: &MobiusMap,
) -> Result<Biquadratic> {
    for t in [t_x, t_y] {
        if t.det().norm() <= 1e-12 * t.entry_scale() * t.entry_scale() {
            return Err(Error::DegenerateMobius);
        }
    }
    let lx = sym_square(t_x);
    let ly = sym_square(t_y);
    let c = curve.matrix();
    let mut out = [[Cx::new(0.0, 0.0); 3]; 3];
    // out = Lxᵀ · C · Ly
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = Cx::new(0.0, 0.0);
            for p in 0..3 {
                for q in 0..3 {
                    acc += lx[p][i] * c[p][q] * ly[q][j];
                }
            }
            out[i][j] = acc;
        }
    }
    Biquadratic::new(out)
}

/// Result of a least-squares biquadratic fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FittedCurve {
    pub curve: Biquadratic,
    /// Gap σ₈ − σ₉ between the two smallest singular values of the design
    /// matrix; a small gap means the curve through the data is not unique.
    pub gap: f64,
    /// Largest relative residual of the input pairs on the fitted curve.
    pub max_residual: f64,
}

/// Fit a biquadratic through point pairs as the null direction of the
/// 9-column monomial design matrix (the singular vector of the smallest
/// singular value).
pub fn fit_biquadratic(pairs: &[(Cx, Cx)]) -> Result<FittedCurve> {
    if pairs.len() < 12 {
        return Err(Error::InsufficientData {
            need: 12,
            got: pairs.len(),
        });
    }
    for (x, y) in pairs {
        if !(x.re.is_finite() && x.im.is_finite() && y.re.is_finite() && y.im.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite pair in fit data".into(),
            ));
        }
    }
    use nalgebra::{Complex, DMatrix};
    let rows: Vec<Complex<f64>> = pairs
        .iter()
        .flat_map(|&(x, y)| {
            let vx = v_of(x);
            let vy = v_of(y);
            let mut row = Vec::with_capacity(9);
            for i in 0..3 {
                for j in 0..3 {
                    let z = vx[i] * vy[j];
                    row.push(Complex::new(z.re, z.im));
                }
            }
            row
        })
        .collect();
    let design = DMatrix::from_row_slice(pairs.len(), 9, &rows);
    let svd = design.svd(false, true);
    let mut order: Vec<usize> = (0..9).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[i]
            .partial_cmp(&svd.singular_values[j])
            .unwrap()
    });
    let gap = svd.singular_values[order[1]] - svd.singular_values[order[0]];
    if gap < 1e-6 {
        return Err(Error::NonUniqueCurve);
    }
    let vt = svd.v_t.as_ref().expect("requested V^T");
    let null_row = vt.row(order[0]);
    let mut c = [[Cx::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let z = null_row[3 * i + j].conj();
            c[i][j] = Cx::new(z.re, z.im);
        }
    }
    let curve = Biquadratic::new(c)?;
    let max_residual = pairs
        .iter()
        .map(|&(x, y)| curve.residual(x, y))
        .fold(0.0_f64, f64::max);
    Ok(FittedCurve {
        curve,
        gap,
        max_residual,
    })
}

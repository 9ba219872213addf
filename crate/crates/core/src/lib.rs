//! Numerical toolkit for autonomous Malmquist-type difference equations
//! `f(z+1)^n = R(f(z))` and their integrable structure.
//!
//! The crate is organized around the objects these equations live on:
//!
//! * [`numkit`] — complex polynomials, root finding, Möbius maps and
//!   rational maps on the Riemann sphere;
//! * [`elliptic`] — Jacobi elliptic functions `sn`, `cn`, `dn` and the
//!   complete elliptic integral `K` for complex argument and modulus;
//! * [`qrt`] — biquadratic curves, the QRT map (symmetric and general),
//!   its invariant, and the elliptic parametrization of the symmetric
//!   canonical form `x²y² + A(x² + y²) + 2Bxy + 1 = 0`;
//! * [`catalog`] — the registry of canonical equations E6–E19 together
//!   with their parameter constraints and known exact solutions;
//! * [`orbit`] — forward iteration on the integer lattice with explicit
//!   n-th-root branch policies and residual auditing;
//! * [`riccati`] — difference Riccati equations, canonicalization to
//!   `f̄ − f = f̄f + A`, and the Riccati factorizations of the catalog
//!   equations E10 and E11;
//! * [`continuum`] — continuum-limit studies `t = εz` against reference
//!   ODE integrations, with convergence-order fits;
//! * [`acceptance`] — the end-to-end verification suite driven both by
//!   the test harness and the `verify` CLI command.

pub mod acceptance;
pub mod catalog;
pub mod continuum;
pub mod elliptic;
pub mod numkit;
pub mod orbit;
pub mod qrt;
pub mod riccati;

pub use numkit::{Cx, Extended, MobiusMap, Polynomial, RationalMap};
pub use qrt::Biquadratic;

/// Errors shared by all modules of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("constant polynomial has no roots")]
    ConstantPolynomial,
    #[error("root finder did not converge within {0} iterations")]
    RootsNotConverged(usize),
    #[error("degenerate Möbius map (determinant underflow)")]
    DegenerateMobius,
    #[error("common-root evaluation (0/0) of a rational map")]
    CommonRootEvaluation,
    #[error("rational map with a common root of numerator and denominator")]
    CommonFactor,
    #[error("denominator polynomial is identically zero")]
    ZeroDenominator,
    #[error("degenerate modulus: |k| = 1")]
    DegenerateModulus,
    #[error("AGM did not converge")]
    AgmNotConverged,
    #[error("modulus outside certified region (Landen sequence does not contract)")]
    ModulusOutsideCertifiedRegion,
    #[error("addition-formula singularity (vanishing denominator)")]
    AdditionFormulaSingularity,
    #[error("Newton iteration did not converge")]
    NewtonNotConverged,
    #[error("parametrization failure: no branch satisfies the B-check")]
    ParametrizationFailure,
    #[error("point off-curve (residual {0:.3e})")]
    PointOffCurve(f64),
    #[error("degenerate fiber: quadratic slice is identically zero")]
    DegenerateFiber,
    #[error("invariant pole: denominator curve vanishes at the point")]
    InvariantPole,
    #[error("non-unique curve: null space of the design matrix is multidimensional")]
    NonUniqueCurve,
    #[error("insufficient data: need at least {need} pairs, got {got}")]
    InsufficientData { need: usize, got: usize },
    #[error("degenerate pencil: matrices not linearly independent")]
    DegeneratePencil,
    #[error("constraint violation for {id}: {relation}")]
    ConstraintViolation { id: String, relation: String },
    #[error("{id}: no biquadratic registered")]
    NoCurveRegistered { id: String },
    #[error("{id}: no constraint")]
    NoConstraint { id: String },
    #[error("{id}: no constructor registered")]
    NoConstructorRegistered { id: String },
    #[error("unknown equation id: {0}")]
    UnknownEquation(String),
    #[error("missing parameter {name} for {id}")]
    MissingParameter { id: String, name: String },
    #[error("indeterminate iterate: R is 0/0 at step {step}")]
    IndeterminateIterate { step: usize },
    #[error("fixed branch sequence exhausted at step {step}")]
    BranchSequenceExhausted { step: usize },
    #[error("branch point hit: iterate equals ±iη")]
    BranchPointHit,
    #[error("non-canonicalizable: b1 = -b3")]
    NonCanonicalizable,
    #[error("step singularity: vanishing denominator")]
    StepSingularity,
    #[error("invalid Riccati coefficients: b2 = b1*b3")]
    DegenerateRiccati,
    #[error("blow-up inside the study window at t = {0}")]
    BlowUpInWindow(f64),
    #[error("invalid study parameters: {0}")]
    InvalidStudy(String),
    #[error("invalid parameter value: {0}")]
    InvalidParameter(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

//! Numerical tolerances shared across the solver.
//!
//! Every threshold the pipeline compares against lives here so that the
//! acceptance suite and the library agree on a single set of numbers.

/// `|sigma * tau(sigma)|` at or below `POLE * max(1, |sigma|^3)` is treated as a pole.
pub const POLE: f64 = 1e-12;

/// Two dual roots merge when `|s1 - s2| <= ROOT_MERGE * max(1, |s1|)`.
pub const ROOT_MERGE: f64 = 1e-9;

/// A dual root is tagged as a peak when `|Q(s)| <= PEAK_Q * max(1, |s|^3)`.
pub const PEAK_Q: f64 = 1e-7;

/// `H1` touches a peak magnitude when `|Phi^2(peak) - H1| <= PEAK_TOUCH * max(1, H1)`.
pub const PEAK_TOUCH: f64 = 1e-9;

/// Residual bound for dual roots: `|Phi^2(s) - H1| <= DUAL_RESIDUAL * max(1, H1)`.
pub const DUAL_RESIDUAL: f64 = 1e-9;

/// Primal/dual agreement: `|P(x) - P^d(s)| <= DUALITY_GAP * max(1, |P(x)|)`.
pub const DUALITY_GAP: f64 = 1e-7;

/// Stationarity: `||grad P(x)|| <= STATIONARITY * scale`.
pub const STATIONARITY: f64 = 1e-6;

/// The Sturm and bracket routes must agree to `PATH_AGREEMENT * max(1, |s|)`.
pub const PATH_AGREEMENT: f64 = 1e-8;

/// Oracle roots of dP/dx and dual-recovered points must agree to this.
pub const ORACLE_AGREEMENT: f64 = 1e-8;

/// Sturm chains drop leading coefficients below this fraction of the chain scale.
pub const STURM_TRUNCATE: f64 = 1e-13;

/// A Hessian eigenvalue is considered zero below `SINGULAR_HESSIAN * max(1, |lambda|_max)`.
pub const SINGULAR_HESSIAN: f64 = 1e-9;

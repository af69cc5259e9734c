//! Complete critical-point enumeration for the nested eighth-order
//! polynomial
//!
//! ```text
//! P(x) = U2(U1(y1(x))) - h.x,   y1(x) = a0/2 |x|^2 + b0.x + c0
//! ```
//!
//! in any dimension, via the canonical dual transformation: every critical
//! point corresponds to a real root of one degree-7 scalar equation, and
//! the largest root yields the global minimizer.
//!
//! * [`primal`] evaluates `P`, its derivatives and the invariants `H1..H4`.
//! * [`dual`] builds the dual function, the region partition and solves the
//!   dual equation.
//! * [`classify`] maps dual roots back to labelled primal critical points.
//! * [`oracle`] re-derives everything by methods that never touch the dual
//!   side.

pub mod classify;
pub mod dual;
pub mod error;
pub mod instances;
pub mod oracle;
pub mod poly;
pub mod primal;
pub mod tolerance;

pub use classify::{solve, CriticalPoint, Label, ManifoldSolution, SolutionReport};
pub use dual::{DualCurve, DualRoot, Region, RegionPartition, RegionTag};
pub use error::{Error, Result};
pub use primal::{Coefficients, DerivedConstants, ProblemSpec};

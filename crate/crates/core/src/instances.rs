//! Reference instances with known critical-point structure.

use crate::primal::{Coefficients, ProblemSpec};

/// `a_i = 1`, `b0 = 3`, `b1 = 2`, `b2 = 1`, `c0 = -1.5`, `c1 = -1`, `c2 = -5`,
/// `h = 2`: seven critical points, `H1 = 4`, `H2 = -4`, `H3 = 4`.
pub fn univariate() -> ProblemSpec {
    ProblemSpec::new(Coefficients {
        a0: 1.0,
        b0: vec![3.0],
        c0: -1.5,
        a1: 1.0,
        b1: 2.0,
        c1: -1.0,
        a2: 1.0,
        b2: 1.0,
        c2: -5.0,
        h: vec![2.0],
    })
    .expect("reference instance is valid")
}

/// Two-dimensional counterpart with `b0 = [3, 0]`, `c2 = -1` and
/// `h = sqrt(2) [1, 1]`; shares `H1..H3` with [`univariate`].
pub fn planar() -> ProblemSpec {
    let r = std::f64::consts::SQRT_2;
    ProblemSpec::new(Coefficients {
        a0: 1.0,
        b0: vec![3.0, 0.0],
        c0: -1.5,
        a1: 1.0,
        b1: 2.0,
        c1: -1.0,
        a2: 1.0,
        b2: 1.0,
        c2: -1.0,
        h: vec![r, r],
    })
    .expect("reference instance is valid")
}

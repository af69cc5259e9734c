//! The primal problem: a nested composite of three quadratics minus a linear
//! term,
//!
//! ```text
//! y1(x) = a0/2 |x|^2 + b0.x + c0
//! y2(y1) = a1/2 y1^2 + b1 y1 + c1
//! P(x)  = a2/2 y2^2 + b2 y2 + c2 - h.x
//! ```
//!
//! together with the invariants `H1..H4`, `K` that drive the dual reduction.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Raw coefficient set, as read from an instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub a0: f64,
    pub b0: Vec<f64>,
    pub c0: f64,
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
    pub h: Vec<f64>,
}

/// A validated problem instance. Dimension is `b0.len()`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "Coefficients")]
pub struct ProblemSpec {
    c: Coefficients,
}

impl From<ProblemSpec> for Coefficients {
    fn from(spec: ProblemSpec) -> Self {
        spec.c
    }
}

impl TryFrom<Coefficients> for ProblemSpec {
    type Error = Error;

    fn try_from(c: Coefficients) -> Result<Self> {
        ProblemSpec::new(c)
    }
}

impl ProblemSpec {
    pub fn new(c: Coefficients) -> Result<Self> {
        let n = c.b0.len();
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        if c.h.len() != n {
            return Err(Error::DimensionMismatch {
                field: "h",
                expected: n,
                found: c.h.len(),
            });
        }
        let scalars = [
            ("a0", c.a0),
            ("c0", c.c0),
            ("a1", c.a1),
            ("b1", c.b1),
            ("c1", c.c1),
            ("a2", c.a2),
            ("b2", c.b2),
            ("c2", c.c2),
        ];
        for (name, value) in scalars {
            if !value.is_finite() {
                return Err(Error::NotFinite { name, value });
            }
        }
        for (name, v) in [("b0", &c.b0), ("h", &c.h)] {
            if let Some(&value) = v.iter().find(|x| !x.is_finite()) {
                return Err(Error::NotFinite { name, value });
            }
        }
        for (name, value) in [("a0", c.a0), ("a1", c.a1), ("a2", c.a2)] {
            if value <= 0.0 {
                return Err(Error::NonPositive { name, value });
            }
        }
        Ok(ProblemSpec { c })
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.c
    }

    pub fn dim(&self) -> usize {
        self.c.b0.len()
    }

    pub fn a0(&self) -> f64 {
        self.c.a0
    }
    pub fn b0(&self) -> &[f64] {
        &self.c.b0
    }
    pub fn c0(&self) -> f64 {
        self.c.c0
    }
    pub fn a1(&self) -> f64 {
        self.c.a1
    }
    pub fn b1(&self) -> f64 {
        self.c.b1
    }
    pub fn c1(&self) -> f64 {
        self.c.c1
    }
    pub fn a2(&self) -> f64 {
        self.c.a2
    }
    pub fn b2(&self) -> f64 {
        self.c.b2
    }
    pub fn c2(&self) -> f64 {
        self.c.c2
    }
    pub fn h(&self) -> &[f64] {
        &self.c.h
    }

    pub fn h_is_zero(&self) -> bool {
        self.c.h.iter().all(|&v| v == 0.0)
    }

    /// Same instance with a different linear term.
    pub fn with_h(&self, h: Vec<f64>) -> Result<Self> {
        ProblemSpec::new(Coefficients {
            h,
            ..self.c.clone()
        })
    }

    /// `y1(x) = a0/2 |x|^2 + b0.x + c0`.
    pub fn eval_y1(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        0.5 * self.c.a0 * dot(x, x) + dot(&self.c.b0, x) + self.c.c0
    }

    /// `y2 = a1/2 y1^2 + b1 y1 + c1`.
    pub fn eval_y2(&self, y1: f64) -> f64 {
        0.5 * self.c.a1 * y1 * y1 + self.c.b1 * y1 + self.c.c1
    }

    /// Outer convex quadratic `U2(y2) = a2/2 y2^2 + b2 y2 + c2`.
    pub fn eval_u2(&self, y2: f64) -> f64 {
        0.5 * self.c.a2 * y2 * y2 + self.c.b2 * y2 + self.c.c2
    }

    /// `P(x)` by nested evaluation.
    pub fn eval_p(&self, x: &[f64]) -> f64 {
        let y1 = self.eval_y1(x);
        self.eval_u2(self.eval_y2(y1)) - dot(&self.c.h, x)
    }

    /// The dual variables `s1 = a1 y1 + b1` and `s2 = a2 y2 + b2` at `x`.
    pub fn stress_pair(&self, x: &[f64]) -> (f64, f64) {
        let y1 = self.eval_y1(x);
        let y2 = self.eval_y2(y1);
        (self.c.a1 * y1 + self.c.b1, self.c.a2 * y2 + self.c.b2)
    }

    /// `a0 x + b0`, the gradient of `y1`.
    pub fn inner_gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.c.b0)
            .map(|(xi, bi)| self.c.a0 * xi + bi)
            .collect()
    }

    /// `grad P = s2 s1 (a0 x + b0) - h`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let (s1, s2) = self.stress_pair(x);
        let factor = s2 * s1;
        self.inner_gradient(x)
            .iter()
            .zip(&self.c.h)
            .map(|(g, h)| factor * g - h)
            .collect()
    }

    /// Coefficients `(alpha, beta)` of the Hessian `alpha I + beta g g^T`
    /// with `g = a0 x + b0`.
    pub fn hessian_parts(&self, x: &[f64]) -> (f64, f64) {
        let (s1, s2) = self.stress_pair(x);
        let alpha = self.c.a0 * s1 * s2;
        let beta = self.c.a1 * s2 + self.c.a2 * s1 * s1;
        (alpha, beta)
    }

    /// Exact Hessian of `P` at `x`.
    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let (alpha, beta) = self.hessian_parts(x);
        let g = self.inner_gradient(x);
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| {
            let diag = if i == j { alpha } else { 0.0 };
            diag + beta * g[i] * g[j]
        })
    }

    /// Dense coefficients (degree 0..=8) of `P` for `n = 1`.
    pub fn expand_univariate(&self) -> Result<[f64; 9]> {
        if self.dim() != 1 {
            return Err(Error::NotUnivariate { n: self.dim() });
        }
        let y1 = Poly::half_quadratic(self.c.a0, self.c.b0[0], self.c.c0);
        let y2 = Poly::compose_half_quadratic(&y1, self.c.a1, self.c.b1, self.c.c1);
        let v = Poly::compose_half_quadratic(&y2, self.c.a2, self.c.b2, self.c.c2);
        let p = v.add(&Poly::new(vec![0.0, -self.c.h[0]]));
        let mut out = [0.0; 9];
        for (k, c) in p.coeffs().iter().enumerate() {
            out[k] = *c;
        }
        Ok(out)
    }

    pub fn derived_constants(&self) -> DerivedConstants {
        DerivedConstants::of(self)
    }
}

/// The invariants of the dual reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h4: f64,
    /// `a2 / (2 a1)`, so that `tau(s) = k (s^2 - H3)`.
    pub k: f64,
}

impl DerivedConstants {
    pub fn of(spec: &ProblemSpec) -> Self {
        let c = &spec.c;
        let (a0, a1, a2) = (c.a0, c.a1, c.a2);
        let h_sq = dot(&c.h, &c.h);
        let b0_sq = dot(&c.b0, &c.b0);
        let b0_h = dot(&c.b0, &c.h);
        let h1 = a1 * h_sq / a0;
        let h2 = (2.0 * a0 * a1 * c.c0 + 2.0 * a0 * c.b1 - a1 * b0_sq) / (2.0 * a0);
        let h3 = -(2.0 * a1 * a2 * c.c1 + 2.0 * a1 * c.b2 - a2 * c.b1 * c.b1) / a2;
        let h4 = (2.0 * a0 * a2 * c.c2 + 2.0 * a2 * b0_h - a0 * c.b2 * c.b2) / (2.0 * a0 * a2);
        DerivedConstants {
            h1,
            h2,
            h3,
            h4,
            k: a2 / (2.0 * a1),
        }
    }

    /// `Re(sqrt(H3))`: zero when `H3 < 0`.
    pub fn re_sqrt_h3(&self) -> f64 {
        if self.h3 > 0.0 {
            self.h3.sqrt()
        } else {
            0.0
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

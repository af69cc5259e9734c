//! Dense univariate polynomials with `f64` coefficients, stored in ascending
//! order, plus the Sturm-chain real-root isolation used by the dual solver.

use crate::tolerance::STURM_TRUNCATE;

/// Dense polynomial `c[0] + c[1] x + ... + c[d] x^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// `c + b x + (a/2) x^2`, the shape of every stage in the nested composite.
    pub fn half_quadratic(a: f64, b: f64, c: f64) -> Self {
        Poly::new(vec![c, b, 0.5 * a])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.coeffs[self.coeffs.len() - 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::constant(0.0);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; len];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            out[k] += c;
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Substitutes `inner` into the half-quadratic `(a/2) y^2 + b y + c`.
    pub fn compose_half_quadratic(inner: &Poly, a: f64, b: f64, c: f64) -> Poly {
        inner
            .mul(inner)
            .scale(0.5 * a)
            .add(&inner.scale(b))
            .add(&Poly::constant(c))
    }

    fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn normalized(&self) -> Poly {
        let m = self.max_abs();
        if m == 0.0 {
            self.clone()
        } else {
            self.scale(1.0 / m)
        }
    }

    /// Remainder of `self / divisor`, with leading terms at the rounding floor
    /// dropped.
    fn remainder(&self, divisor: &Poly) -> Poly {
        let mut rem = self.coeffs.clone();
        let dlen = divisor.coeffs.len();
        let lead = divisor.leading();
        let mut q_max: f64 = 0.0;
        while rem.len() >= dlen {
            let q = rem[rem.len() - 1] / lead;
            q_max = q_max.max(q.abs());
            let shift = rem.len() - dlen;
            for (k, d) in divisor.coeffs.iter().enumerate() {
                rem[shift + k] -= q * d;
            }
            rem.pop();
        }
        let floor = STURM_TRUNCATE * self.max_abs().max(q_max * divisor.max_abs());
        while rem.last().is_some_and(|c| c.abs() <= floor) {
            rem.pop();
        }
        Poly::new(rem)
    }
}

/// Sturm sequence of a polynomial; counts distinct real roots on half-open
/// intervals.
#[derive(Debug, Clone)]
pub struct SturmChain {
    chain: Vec<Poly>,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Self {
        let p0 = p.normalized();
        let p1 = p0.derivative().normalized();
        let mut chain = vec![p0];
        if !p1.is_zero() {
            chain.push(p1);
        }
        while chain.len() >= 2 {
            let k = chain.len();
            let rem = chain[k - 2].remainder(&chain[k - 1]);
            if rem.is_zero() {
                break;
            }
            chain.push(rem.scale(-1.0).normalized());
        }
        SturmChain { chain }
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    pub fn sign_variations(&self, x: f64) -> usize {
        let mut count = 0;
        let mut last = 0.0f64;
        for p in &self.chain {
            let v = p.eval(x);
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                count += 1;
            }
            last = v;
        }
        count
    }

    /// Distinct roots in `(lo, hi]`.
    pub fn count(&self, lo: f64, hi: f64) -> usize {
        self.sign_variations(lo)
            .saturating_sub(self.sign_variations(hi))
    }

    /// Disjoint brackets `(lo, hi]` each holding one root (or an unresolvable
    /// cluster, reported once).
    pub fn isolate(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut stack = vec![(lo, hi, self.count(lo, hi))];
        while let Some((a, b, n)) = stack.pop() {
            if n == 0 {
                continue;
            }
            let width_floor = 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0);
            if n == 1 || b - a <= width_floor {
                out.push((a, b));
                continue;
            }
            let mut mid = 0.5 * (a + b);
            let mut nudge = 0.25 * (b - a);
            while self.chain[0].eval(mid) == 0.0 && nudge > width_floor {
                mid += nudge;
                nudge *= 0.5;
            }
            let left = self.count(a, mid);
            stack.push((mid, b, n.saturating_sub(left)));
            stack.push((a, mid, left));
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }
}

/// Cauchy bound: every real root lies in `(-bound, bound)`.
pub fn cauchy_bound(p: &Poly) -> f64 {
    let lead = p.leading().abs();
    let m = p.coeffs[..p.coeffs.len() - 1]
        .iter()
        .fold(0.0f64, |m, c| m.max(c.abs()));
    1.0 + m / lead
}

/// Safeguarded Newton-bisection on `[lo, hi]`; `f` returns value and slope.
/// Returns `None` when the endpoints do not bracket a sign change.
pub fn refine_bracketed<F>(f: F, mut lo: f64, mut hi: f64) -> Option<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (mut flo, _) = f(lo);
    let (mut fhi, _) = f(hi);
    // An exact zero at an endpoint may belong to the neighbouring bracket;
    // step inside and only accept the endpoint if no interior change remains.
    let inset = 1e-9 * (hi - lo);
    if flo == 0.0 {
        let (v, _) = f(lo + inset);
        if v == 0.0 || fhi == 0.0 || (v > 0.0) == (fhi > 0.0) {
            return Some(lo);
        }
        lo += inset;
        flo = v;
    }
    if fhi == 0.0 {
        let (v, _) = f(hi - inset);
        if v == 0.0 || (v > 0.0) == (flo > 0.0) {
            return Some(hi);
        }
        hi -= inset;
        fhi = v;
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return None;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if (fx > 0.0) == (flo > 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-15 * x.abs().max(1.0) || hi - lo <= 1e-15 * x.abs().max(1.0) {
            return Some(next);
        }
        x = next;
    }
    Some(x)
}

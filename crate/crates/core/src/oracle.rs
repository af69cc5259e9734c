//! Independent verification of the dual pipeline.
//!
//! Nothing here touches [`crate::dual`]: critical points are recovered
//! directly from the primal, by Sturm isolation of `dP/dx` (n = 1) or by
//! multistart descent (any n).

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::primal::{norm, ProblemSpec};
use crate::tolerance;

/// Fixed generator seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x5eed_0c71c;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootIsolationResult {
    /// Disjoint brackets `(lo, hi]`, one root each, ascending.
    pub intervals: Vec<(f64, f64)>,
    pub refined_roots: Vec<f64>,
    /// Sign variations of the Sturm chain at each bracket endpoint.
    pub sturm_sign_counts: Vec<(usize, usize)>,
    /// Distinct real roots counted by the chain on the search interval.
    pub sturm_total: usize,
    pub search_bound: f64,
}

// Ascending-coefficient helpers, kept separate from `crate::poly`.

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

fn differentiate(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &v)| k as f64 * v)
        .collect()
}

fn trim(mut c: Vec<f64>, floor: f64) -> Vec<f64> {
    while c.last().is_some_and(|v| v.abs() <= floor) {
        c.pop();
    }
    c
}

fn max_norm(c: &[f64]) -> f64 {
    c.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Pseudo-remainder `|lc(b)|^k a mod b`; using the absolute leading
/// coefficient keeps the Sturm sign convention intact.
fn pseudo_remainder(a: &[f64], b: &[f64]) -> Vec<f64> {
    let lead = b[b.len() - 1];
    let mut r = a.to_vec();
    let scale = max_norm(a).max(max_norm(b));
    while r.len() >= b.len() {
        let top = r[r.len() - 1];
        let shift = r.len() - b.len();
        for v in r.iter_mut() {
            *v *= lead.abs();
        }
        let f = top * lead.signum();
        for (k, bv) in b.iter().enumerate() {
            r[shift + k] -= f * bv;
        }
        r.pop();
        let m = max_norm(&r);
        if m > 0.0 {
            for v in r.iter_mut() {
                *v /= m;
            }
        }
    }
    trim(r, tolerance::STURM_TRUNCATE * scale.max(1.0))
}

fn sturm_sequence(c: &[f64]) -> Vec<Vec<f64>> {
    let m = max_norm(c);
    let p0: Vec<f64> = c.iter().map(|v| v / m).collect();
    let d = differentiate(&p0);
    let dm = max_norm(&d);
    let mut seq = vec![p0];
    if dm > 0.0 {
        seq.push(d.iter().map(|v| v / dm).collect());
    }
    while seq.len() >= 2 {
        let k = seq.len();
        let r = pseudo_remainder(&seq[k - 2], &seq[k - 1]);
        if r.is_empty() {
            break;
        }
        let rm = max_norm(&r);
        seq.push(r.iter().map(|v| -v / rm).collect());
    }
    seq
}

fn variations(seq: &[Vec<f64>], x: f64) -> usize {
    let signs: Vec<bool> = seq
        .iter()
        .map(|p| horner(p, x))
        .filter(|v| *v != 0.0)
        .map(|v| v > 0.0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn bisect_root(c: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = horner(c, lo);
    if flo == 0.0 {
        return lo;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let fm = horner(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Isolates and refines every real root of a raw polynomial given by
/// ascending coefficients.
pub fn isolate_real_roots(coeffs: &[f64]) -> RootIsolationResult {
    let c = trim(coeffs.to_vec(), 0.0);
    if c.len() < 2 {
        return RootIsolationResult {
            intervals: Vec::new(),
            refined_roots: Vec::new(),
            sturm_sign_counts: Vec::new(),
            sturm_total: 0,
            search_bound: 0.0,
        };
    }
    let lead = c[c.len() - 1].abs();
    let bound = 2.0 + 2.0 * max_norm(&c[..c.len() - 1]) / lead;
    let seq = sturm_sequence(&c);
    let total = variations(&seq, -bound).saturating_sub(variations(&seq, bound));

    let mut intervals = Vec::new();
    let mut work = vec![(-bound, bound)];
    while let Some((lo, hi)) = work.pop() {
        let n = variations(&seq, lo).saturating_sub(variations(&seq, hi));
        if n == 0 {
            continue;
        }
        if n == 1 || hi - lo <= 1e-13 * hi.abs().max(1.0) {
            intervals.push((lo, hi));
            continue;
        }
        let mut mid = 0.5 * (lo + hi);
        // Keep split points off exact roots.
        let mut k = 1;
        while horner(&c, mid) == 0.0 && k < 30 {
            mid = lo + (hi - lo) * (0.5 + 0.5f64.powi(k + 2));
            k += 1;
        }
        work.push((lo, mid));
        work.push((mid, hi));
    }
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let sturm_sign_counts = intervals
        .iter()
        .map(|&(lo, hi)| (variations(&seq, lo), variations(&seq, hi)))
        .collect();
    let refined_roots = intervals
        .iter()
        .map(|&(lo, hi)| {
            if horner(&c, hi) == 0.0 {
                hi
            } else {
                bisect_root(&c, lo, hi)
            }
        })
        .collect();
    RootIsolationResult {
        intervals,
        refined_roots,
        sturm_sign_counts,
        sturm_total: total,
        search_bound: bound,
    }
}

/// Real roots of `dP/dx` for a univariate instance, from the dense
/// expansion, polished with Newton steps on the nested derivative.
pub fn isolate_derivative_roots(spec: &ProblemSpec) -> Result<RootIsolationResult> {
    let dense = spec.expand_univariate()?;
    let mut result = isolate_real_roots(&differentiate(&dense));
    for (root, &(lo, hi)) in result.refined_roots.iter_mut().zip(&result.intervals) {
        *root = polish_1d(spec, *root, lo, hi);
    }
    Ok(result)
}

fn polish_1d(spec: &ProblemSpec, mut x: f64, lo: f64, hi: f64) -> f64 {
    for _ in 0..4 {
        let g = spec.gradient(&[x])[0];
        let h = spec.hessian(&[x])[(0, 0)];
        if g == 0.0 || h == 0.0 {
            break;
        }
        let next = x - g / h;
        if !(next >= lo && next <= hi) || spec.gradient(&[next])[0].abs() >= g.abs() {
            break;
        }
        x = next;
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    Gradient,
    Hessian,
}

/// Worst relative deviation between the analytic gradient (or Hessian) and
/// central differences with step `1e-6 (1 + |x_i|)`.
pub fn finite_difference_check(spec: &ProblemSpec, x: &[f64], order: DerivativeOrder) -> f64 {
    let n = x.len();
    let shifted = |i: usize, step: f64| {
        let mut y = x.to_vec();
        y[i] += step;
        y
    };
    let step_for = |i: usize| 1e-6 * (1.0 + x[i].abs());
    match order {
        DerivativeOrder::Gradient => {
            let g = spec.gradient(x);
            (0..n)
                .map(|i| {
                    let d = step_for(i);
                    let fd =
                        (spec.eval_p(&shifted(i, d)) - spec.eval_p(&shifted(i, -d))) / (2.0 * d);
                    (g[i] - fd).abs() / g[i].abs().max(1.0)
                })
                .fold(0.0, f64::max)
        }
        DerivativeOrder::Hessian => {
            let hess = spec.hessian(x);
            let scale = hess.amax().max(1.0);
            let mut worst: f64 = 0.0;
            for j in 0..n {
                let d = step_for(j);
                let gp = spec.gradient(&shifted(j, d));
                let gm = spec.gradient(&shifted(j, -d));
                for i in 0..n {
                    let fd = (gp[i] - gm[i]) / (2.0 * d);
                    worst = worst.max((hess[(i, j)] - fd).abs() / scale);
                }
            }
            worst
        }
    }
}

/// Newton iteration on `grad P = 0` from `x0`. Returns the point once the
/// gradient is below the stationarity bound.
pub fn newton_polish(spec: &ProblemSpec, x0: &[f64]) -> Option<Vec<f64>> {
    let scale = gradient_scale(spec);
    let mut x = x0.to_vec();
    for _ in 0..50 {
        let g = spec.gradient(&x);
        let gn = norm(&g);
        if gn <= tolerance::STATIONARITY * scale * 1e-3 {
            break;
        }
        let hess = spec.hessian(&x);
        let step = hess.lu().solve(&nalgebra::DVector::from_vec(g))?;
        let next: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - s).collect();
        if norm(&spec.gradient(&next)) >= gn {
            break;
        }
        x = next;
    }
    (norm(&spec.gradient(&x)) <= tolerance::STATIONARITY * scale).then_some(x)
}

/// Reference magnitude for gradient norms: `max(1, |h|)`.
pub fn gradient_scale(spec: &ProblemSpec) -> f64 {
    norm(spec.h()).max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentConfig {
    pub starts: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub seed: u64,
    pub max_iters: usize,
    pub armijo: f64,
}

impl DescentConfig {
    pub fn new(starts: usize, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        DescentConfig {
            starts,
            lower,
            upper,
            seed: DEFAULT_SEED,
            max_iters: 10_000,
            armijo: 1e-4,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergedPoint {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    /// Number of starts that ended here.
    pub hits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentResult {
    pub seed: u64,
    pub starts: Vec<Vec<f64>>,
    /// Sorted by value, then lexicographically by `x`.
    pub converged_points: Vec<ConvergedPoint>,
    pub dropped: usize,
    pub best_value: f64,
    pub best_point: Vec<f64>,
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    out
}

/// Halton points in the box, randomly rotated (Cranley-Patterson) by the
/// seeded generator.
pub fn quasi_random_starts(config: &DescentConfig) -> Vec<Vec<f64>> {
    let n = config.lower.len();
    let mut rng = StdRng::seed_from_u64(config.seed);
    let shift: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    (0..config.starts)
        .map(|k| {
            (0..n)
                .map(|d| {
                    let base = if d < PRIMES.len() {
                        PRIMES[d] as u64
                    } else {
                        // Beyond the table fall back to plain pseudo-random.
                        0
                    };
                    let u = if base == 0 {
                        rng.gen::<f64>()
                    } else {
                        (radical_inverse(k as u64 + 1, base) + shift[d]).fract()
                    };
                    config.lower[d] + u * (config.upper[d] - config.lower[d])
                })
                .collect()
        })
        .collect()
}

fn descend(spec: &ProblemSpec, start: &[f64], config: &DescentConfig) -> Option<Vec<f64>> {
    let scale = gradient_scale(spec);
    let mut x = start.to_vec();
    let mut fx = spec.eval_p(&x);
    let mut t = 1.0;
    for _ in 0..config.max_iters {
        let g = spec.gradient(&x);
        let gg: f64 = g.iter().map(|v| v * v).sum();
        if gg.sqrt() <= tolerance::STATIONARITY * scale {
            break;
        }
        t *= 2.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - t * b).collect();
            let ft = spec.eval_p(&trial);
            if ft <= fx - config.armijo * t * gg {
                x = trial;
                fx = ft;
                break;
            }
            t *= 0.5;
            if t < 1e-300 {
                return newton_polish(spec, &x);
            }
        }
    }
    // Descent gets close; Newton nails the last digits.
    newton_polish(spec, &x)
}

/// Gradient descent with Armijo backtracking from quasi-random starts, with
/// converged points deduplicated.
pub fn multistart_descent(spec: &ProblemSpec, config: &DescentConfig) -> DescentResult {
    let starts = quasi_random_starts(config);
    let scale = gradient_scale(spec);
    let mut found: Vec<ConvergedPoint> = Vec::new();
    let mut dropped = 0;
    for s in &starts {
        match descend(spec, s, config) {
            Some(x) => {
                let merge = 1e-6 * norm(&x).max(1.0);
                if let Some(p) = found.iter_mut().find(|p| distance(&p.x, &x) <= merge) {
                    p.hits += 1;
                } else {
                    let g = norm(&spec.gradient(&x));
                    if g <= tolerance::STATIONARITY * scale {
                        found.push(ConvergedPoint {
                            value: spec.eval_p(&x),
                            gradient_norm: g,
                            x,
                            hits: 1,
                        });
                    } else {
                        dropped += 1;
                    }
                }
            }
            None => dropped += 1,
        }
    }
    found.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| lex_cmp(&a.x, &b.x))
    });
    let (best_value, best_point) = found
        .first()
        .map(|p| (p.value, p.x.clone()))
        .unwrap_or((f64::INFINITY, Vec::new()));
    DescentResult {
        seed: config.seed,
        starts,
        converged_points: found,
        dropped,
        best_value,
        best_point,
    }
}

/// For `n = 1`: the stationary point between each pair of consecutive
/// minima, located by bisection on the sign of `dP/dx`.
pub fn maxima_between(spec: &ProblemSpec, minima: &[f64]) -> Vec<f64> {
    let mut sorted = minima.to_vec();
    sorted.sort_by(f64::total_cmp);
    let dp = |x: f64| spec.gradient(&[x])[0];
    sorted
        .windows(2)
        .filter_map(|w| {
            let inset = 1e-6 * (w[1] - w[0]);
            let (mut lo, mut hi) = (w[0] + inset, w[1] - inset);
            if !(dp(lo) > 0.0 && dp(hi) < 0.0) {
                return None;
            }
            while hi - lo > 1e-15 * lo.abs().max(1.0) {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if dp(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Some(0.5 * (lo + hi))
        })
        .collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

//! The canonical dual side of the problem.
//!
//! Eliminating both dual variables in favour of `s = a1 y1 + b1` turns the
//! `n`-dimensional critical-point problem into the scalar equation
//!
//! ```text
//! Phi(s)^2 = 2 [s tau(s)]^2 (s - H2) = H1,    tau(s) = K (s^2 - H3)
//! ```
//!
//! whose real solutions are in one-to-one correspondence with the primal
//! critical points through `x(s) = (h / (s tau(s)) - b0) / a0`.
//!
//! Real solutions are enumerated twice: by Sturm isolation on the dense
//! degree-7 polynomial, and by bisection inside each monotone sub-interval
//! of the region partition. The two routes must agree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{cauchy_bound, refine_bracketed, Poly, SturmChain};
use crate::primal::{dot, DerivedConstants, ProblemSpec};
use crate::tolerance;

/// The four intervals of the dual axis delimited by `H2`, `Re(-sqrt H3)`,
/// `0` and `Re(sqrt H3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// `(H2, Re(-sqrt H3))`.
    #[serde(rename = "S_a-")]
    Lower,
    /// `(max(H2, -sqrt H3), 0)`.
    #[serde(rename = "S_1")]
    NegativeInner,
    /// `(max(H2, 0), Re(sqrt H3))`.
    #[serde(rename = "S_2")]
    PositiveInner,
    /// `(max(H2, Re(sqrt H3)), inf)`; hosts the global minimizer's image.
    #[serde(rename = "S_a+")]
    Upper,
}

/// Where a dual root sits relative to the region partition and its peaks.
///
/// "Rising" sub-intervals lie left of the region's peak, where `Phi^2`
/// increases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionTag {
    #[serde(rename = "S_a+^-")]
    LowerRising,
    #[serde(rename = "S_a-^-")]
    LowerFalling,
    #[serde(rename = "S_1+")]
    NegativeRising,
    #[serde(rename = "S_1-")]
    NegativeFalling,
    #[serde(rename = "S_2+")]
    PositiveRising,
    #[serde(rename = "S_2-")]
    PositiveFalling,
    #[serde(rename = "S_a^+")]
    Upper,
    #[serde(rename = "PEAK")]
    Peak,
    #[serde(rename = "H_ZERO_FAMILY")]
    HZeroFamily,
}

impl RegionTag {
    fn of(region: Region, rising: bool) -> Self {
        match (region, rising) {
            (Region::Lower, true) => RegionTag::LowerRising,
            (Region::Lower, false) => RegionTag::LowerFalling,
            (Region::NegativeInner, true) => RegionTag::NegativeRising,
            (Region::NegativeInner, false) => RegionTag::NegativeFalling,
            (Region::PositiveInner, true) => RegionTag::PositiveRising,
            (Region::PositiveInner, false) => RegionTag::PositiveFalling,
            (Region::Upper, _) => RegionTag::Upper,
        }
    }
}

/// A non-empty bounded region together with its unique `Phi^2` maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundedRegion {
    pub region: Region,
    pub lo: f64,
    pub hi: f64,
    /// Root of `Q` inside `(lo, hi)`.
    pub peak: f64,
    /// `Phi(peak)^2`.
    pub peak_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPartition {
    pub h2: f64,
    /// `Re(-sqrt H3)`.
    pub neg_marker: f64,
    /// `Re(sqrt H3)`.
    pub pos_marker: f64,
    /// Non-empty bounded regions in ascending order.
    pub bounded: Vec<BoundedRegion>,
    /// Left end of the unbounded region.
    pub upper_lo: f64,
}

impl RegionPartition {
    pub fn get(&self, region: Region) -> Option<&BoundedRegion> {
        self.bounded.iter().find(|b| b.region == region)
    }

    pub fn is_empty(&self, region: Region) -> bool {
        region != Region::Upper && self.get(region).is_none()
    }

    /// Region and sub-interval of `sigma`; `None` on a boundary or below `H2`.
    pub fn locate(&self, sigma: f64) -> Option<(Region, RegionTag)> {
        if sigma > self.upper_lo {
            return Some((Region::Upper, RegionTag::Upper));
        }
        self.bounded
            .iter()
            .find(|b| sigma > b.lo && sigma < b.hi)
            .map(|b| (b.region, RegionTag::of(b.region, sigma < b.peak)))
    }
}

/// `Phi^2` at a peak; governs how many dual roots survive as `H1` grows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakMagnitude {
    pub region: Region,
    pub sigma: f64,
    pub phi_squared: f64,
}

impl PeakMagnitude {
    /// `|Phi(peak)|`, the value of `sqrt(H1)` at which the peak is touched.
    pub fn magnitude(&self) -> f64 {
        self.phi_squared.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualRoot {
    pub sigma: f64,
    pub tag: RegionTag,
    pub region: Option<Region>,
    /// `|Phi(sigma)^2 - H1|`.
    pub residual: f64,
}

/// Roots of the dual equation plus the agreement record between the Sturm
/// route and the bracket route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSolution {
    /// Descending in `sigma`.
    pub roots: Vec<DualRoot>,
    pub sturm_count: usize,
    pub bracket_count: usize,
    pub max_path_deviation: f64,
    pub paths_agree: bool,
    /// Peaks whose magnitude equals `H1` within tolerance.
    pub touched_peaks: Vec<Region>,
}

/// A stationary point of `P^d` that does not solve the dual equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpuriousPoint {
    pub sigma: f64,
    pub dual_derivative: f64,
    /// `x(sigma)`, absent at a pole.
    pub x: Option<Vec<f64>>,
    pub gradient_norm: Option<f64>,
}

/// All `sigma`-functions of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCurve {
    spec: ProblemSpec,
    constants: DerivedConstants,
}

impl DualCurve {
    pub fn new(spec: &ProblemSpec) -> Self {
        DualCurve {
            spec: spec.clone(),
            constants: spec.derived_constants(),
        }
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn constants(&self) -> &DerivedConstants {
        &self.constants
    }

    pub fn tau(&self, sigma: f64) -> f64 {
        self.constants.k * (sigma * sigma - self.constants.h3)
    }

    pub fn sigma_tau(&self, sigma: f64) -> f64 {
        sigma * self.tau(sigma)
    }

    /// `d[s tau(s)]/ds = K (3 s^2 - H3)`.
    pub fn sigma_tau_slope(&self, sigma: f64) -> f64 {
        self.constants.k * (3.0 * sigma * sigma - self.constants.h3)
    }

    pub fn phi_squared(&self, sigma: f64) -> f64 {
        let st = self.sigma_tau(sigma);
        2.0 * st * st * (sigma - self.constants.h2)
    }

    /// Analytic `d[Phi^2]/ds`.
    pub fn phi_squared_slope(&self, sigma: f64) -> f64 {
        let st = self.sigma_tau(sigma);
        4.0 * st * self.sigma_tau_slope(sigma) * (sigma - self.constants.h2) + 2.0 * st * st
    }

    pub fn q_cubic(&self, sigma: f64) -> f64 {
        let DerivedConstants { h2, h3, .. } = self.constants;
        ((7.0 * sigma - 6.0 * h2) * sigma - 3.0 * h3) * sigma + 2.0 * h2 * h3
    }

    /// Critical points `(sigma-, sigma+)` of `Q`, when real.
    pub fn q_critical_points(&self) -> Option<(f64, f64)> {
        let DerivedConstants { h2, h3, .. } = self.constants;
        let disc = 4.0 * h2 * h2 + 7.0 * h3;
        if disc < 0.0 {
            return None;
        }
        let r = disc.sqrt();
        Some(((2.0 * h2 - r) / 7.0, (2.0 * h2 + r) / 7.0))
    }

    fn check_pole(&self, sigma: f64) -> Result<f64> {
        let st = self.sigma_tau(sigma);
        if st.abs() <= tolerance::POLE * sigma.abs().powi(3).max(1.0) {
            Err(Error::Pole {
                sigma,
                magnitude: st.abs(),
            })
        } else {
            Ok(st)
        }
    }

    /// Canonical dual function `P^d`.
    ///
    /// With `H1 = 0` the last term has a removable singularity and is
    /// evaluated in its reduced polynomial form, so no pole is raised.
    pub fn dual_value(&self, sigma: f64) -> Result<f64> {
        let DerivedConstants { h1, h2, h3, h4, .. } = self.constants;
        let (a1, a2) = (self.spec.a1(), self.spec.a2());
        let d = sigma * sigma - h3;
        let head = h4 + a2 * d * d / (8.0 * a1 * a1);
        if h1 == 0.0 {
            return Ok(head - self.sigma_tau(sigma) * (sigma - h2) / a1);
        }
        self.check_pole(sigma)?;
        Ok(head - (self.phi_squared(sigma) + h1) / (a2 * sigma * d))
    }

    /// `dP^d/ds = a2 (3 s^2 - H3) (H1 - Phi^2) / [2 a1 s tau]^2`.
    pub fn dual_derivative(&self, sigma: f64) -> Result<f64> {
        let DerivedConstants { h1, h2, h3, .. } = self.constants;
        let (a1, a2) = (self.spec.a1(), self.spec.a2());
        let cubic = 3.0 * sigma * sigma - h3;
        if h1 == 0.0 {
            return Ok(-a2 * cubic * (sigma - h2) / (2.0 * a1 * a1));
        }
        let st = self.check_pole(sigma)?;
        let denom = 2.0 * a1 * st;
        Ok(a2 * cubic * (h1 - self.phi_squared(sigma)) / (denom * denom))
    }

    /// Primal point `x(s) = (h / (s tau(s)) - b0) / a0`.
    pub fn x_of_sigma(&self, sigma: f64) -> Result<Vec<f64>> {
        let st = self.check_pole(sigma)?;
        let a0 = self.spec.a0();
        Ok(self
            .spec
            .h()
            .iter()
            .zip(self.spec.b0())
            .map(|(h, b)| (h / st - b) / a0)
            .collect())
    }

    /// Legendre conjugate of `U1(y) = a1/2 y^2 + b1 y + c1`.
    pub fn conjugate_u1(&self, s1: f64) -> f64 {
        let d = s1 - self.spec.b1();
        d * d / (2.0 * self.spec.a1()) - self.spec.c1()
    }

    /// Legendre conjugate of `U2(y) = a2/2 y^2 + b2 y + c2`.
    pub fn conjugate_u2(&self, s2: f64) -> f64 {
        let d = s2 - self.spec.b2();
        d * d / (2.0 * self.spec.a2()) - self.spec.c2()
    }

    /// Total complementary function `Xi(x, s)`.
    pub fn eval_xi(&self, x: &[f64], sigma: f64) -> f64 {
        let tau = self.tau(sigma);
        self.spec.eval_y1(x) * sigma * tau
            - self.conjugate_u1(sigma) * tau
            - self.conjugate_u2(tau)
            - dot(self.spec.h(), x)
    }

    /// `dXi/ds = d[s tau]/ds (y1(x) - (s - b1)/a1)`.
    pub fn xi_sigma_derivative(&self, x: &[f64], sigma: f64) -> f64 {
        self.sigma_tau_slope(sigma)
            * (self.spec.eval_y1(x) - (sigma - self.spec.b1()) / self.spec.a1())
    }

    /// Dense coefficients of `Phi(s)^2 - H1`, degree exactly 7.
    pub fn dual_polynomial(&self) -> Poly {
        let DerivedConstants { h1, h2, h3, k, .. } = self.constants;
        let sigma_tau = Poly::new(vec![0.0, -h3, 0.0, 1.0]);
        sigma_tau
            .mul(&sigma_tau)
            .mul(&Poly::new(vec![-h2, 1.0]))
            .scale(2.0 * k * k)
            .add(&Poly::constant(-h1))
    }

    pub fn region_partition(&self) -> RegionPartition {
        let DerivedConstants { h2, .. } = self.constants;
        let pos_marker = self.constants.re_sqrt_h3();
        let neg_marker = -pos_marker;
        let mut bounded = Vec::new();
        let candidates = [
            (Region::Lower, h2 < neg_marker, h2, neg_marker),
            (
                Region::NegativeInner,
                neg_marker < 0.0 && h2 < 0.0,
                h2.max(neg_marker),
                0.0,
            ),
            (
                Region::PositiveInner,
                0.0 < pos_marker && h2 < pos_marker,
                h2.max(0.0),
                pos_marker,
            ),
        ];
        for (region, nonempty, lo, hi) in candidates {
            if nonempty {
                let peak = self.locate_peak(lo, hi);
                bounded.push(BoundedRegion {
                    region,
                    lo,
                    hi,
                    peak,
                    peak_value: self.phi_squared(peak),
                });
            }
        }
        RegionPartition {
            h2,
            neg_marker,
            pos_marker,
            bounded,
            upper_lo: h2.max(pos_marker),
        }
    }

    /// Unique root of `Q` in `(lo, hi)`. `Phi^2` vanishes at both ends and
    /// `s tau(s)` keeps one sign inside, so `Q * sign(s tau)` runs from
    /// positive to negative across the interval.
    fn locate_peak(&self, lo: f64, hi: f64) -> f64 {
        let orient = self.sigma_tau(0.5 * (lo + hi)).signum();
        let g = |s: f64| orient * self.q_cubic(s);
        let (mut a, mut b) = (lo, hi);
        loop {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let v = g(mid);
            if v == 0.0 {
                return mid;
            }
            if v > 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        if g(a).abs() <= g(b).abs() {
            a
        } else {
            b
        }
    }

    pub fn peak_magnitudes(&self, partition: &RegionPartition) -> Vec<PeakMagnitude> {
        partition
            .bounded
            .iter()
            .map(|b| PeakMagnitude {
                region: b.region,
                sigma: b.peak,
                phi_squared: b.peak_value,
            })
            .collect()
    }

    fn peak_touched(&self, peak_value: f64) -> bool {
        let h1 = self.constants.h1;
        (peak_value - h1).abs() <= tolerance::PEAK_TOUCH * h1.max(1.0)
    }

    fn make_root(&self, sigma: f64, tag: RegionTag, region: Option<Region>) -> DualRoot {
        DualRoot {
            sigma,
            tag,
            region,
            residual: (self.phi_squared(sigma) - self.constants.h1).abs(),
        }
    }

    /// Roots of the `h = 0` dual equation: `{0, +-sqrt H3, H2}` restricted
    /// to `s >= H2`.
    pub fn h_zero_family(&self) -> Vec<f64> {
        let DerivedConstants { h2, h3, .. } = self.constants;
        let mut levels = vec![0.0, h2];
        if h3 >= 0.0 {
            levels.push(h3.sqrt());
            levels.push(-h3.sqrt());
        }
        let mut kept: Vec<f64> = Vec::new();
        for s in levels {
            if s < h2 {
                continue;
            }
            if !kept.iter().any(|&k| same_root(k, s)) {
                kept.push(s);
            }
        }
        kept.sort_by(|a, b| b.total_cmp(a));
        kept
    }

    /// Every real solution of `Phi(s)^2 = H1` with `s >= H2`.
    pub fn solve_dual_equation(&self, partition: &RegionPartition) -> DualSolution {
        if self.constants.h1 == 0.0 {
            let roots: Vec<DualRoot> = self
                .h_zero_family()
                .into_iter()
                .map(|s| self.make_root(s, RegionTag::HZeroFamily, None))
                .collect();
            let count = roots.len();
            return DualSolution {
                roots,
                sturm_count: count,
                bracket_count: count,
                max_path_deviation: 0.0,
                paths_agree: true,
                touched_peaks: Vec::new(),
            };
        }

        let touched: Vec<&BoundedRegion> = partition
            .bounded
            .iter()
            .filter(|b| self.peak_touched(b.peak_value))
            .collect();

        let mut sturm = self.sturm_roots(partition);
        for b in &touched {
            sturm.retain(|r| r.region != Some(b.region));
            sturm.push(self.make_root(b.peak, RegionTag::Peak, Some(b.region)));
        }
        sturm.sort_by(|a, b| b.sigma.total_cmp(&a.sigma));

        let bracket = self.bracket_roots(partition);

        let mut paths_agree = sturm.len() == bracket.len();
        let mut max_dev: f64 = 0.0;
        if paths_agree {
            for (s, b) in sturm.iter().zip(&bracket) {
                let dev = (s.sigma - b.sigma).abs();
                max_dev = max_dev.max(dev);
                if dev > tolerance::PATH_AGREEMENT * s.sigma.abs().max(1.0) || s.tag != b.tag {
                    paths_agree = false;
                }
            }
        } else {
            max_dev = f64::INFINITY;
        }

        DualSolution {
            sturm_count: sturm.len(),
            bracket_count: bracket.len(),
            roots: if paths_agree { sturm } else { bracket },
            max_path_deviation: max_dev,
            paths_agree,
            touched_peaks: touched.iter().map(|b| b.region).collect(),
        }
    }

    /// Sturm isolation on the dense degree-7 polynomial, refined on the
    /// factored form.
    fn sturm_roots(&self, partition: &RegionPartition) -> Vec<DualRoot> {
        let h1 = self.constants.h1;
        let h2 = self.constants.h2;
        let dense = self.dual_polynomial();
        let dense_slope = dense.derivative();
        let chain = SturmChain::new(&dense);
        let hi = cauchy_bound(&dense).max(h2.abs() + 1.0);
        let factored = |s: f64| (self.phi_squared(s) - h1, self.phi_squared_slope(s));
        let mut out: Vec<DualRoot> = Vec::new();
        for (a, b) in chain.isolate(h2, hi) {
            let sigma = refine_bracketed(factored, a, b)
                .or_else(|| refine_bracketed(|s| (dense.eval(s), dense_slope.eval(s)), a, b))
                .unwrap_or(0.5 * (a + b));
            if sigma <= h2 || out.iter().any(|r| same_root(r.sigma, sigma)) {
                continue;
            }
            let Some((region, side)) = partition.locate(sigma) else {
                continue;
            };
            let tag = if region != Region::Upper && self.near_peak(sigma) {
                RegionTag::Peak
            } else {
                side
            };
            out.push(self.make_root(sigma, tag, Some(region)));
        }
        out
    }

    fn near_peak(&self, sigma: f64) -> bool {
        self.q_cubic(sigma).abs() <= tolerance::PEAK_Q * sigma.abs().powi(3).max(1.0)
    }

    /// Cross-check route: one bisection per monotone sub-interval.
    pub fn bracket_roots(&self, partition: &RegionPartition) -> Vec<DualRoot> {
        let h1 = self.constants.h1;
        let f = |s: f64| (self.phi_squared(s) - h1, self.phi_squared_slope(s));
        let mut out = Vec::new();
        for b in &partition.bounded {
            if self.peak_touched(b.peak_value) {
                out.push(self.make_root(b.peak, RegionTag::Peak, Some(b.region)));
                continue;
            }
            if b.peak_value < h1 {
                continue;
            }
            for (lo, hi, rising) in [(b.lo, b.peak, true), (b.peak, b.hi, false)] {
                if let Some(s) = refine_bracketed(f, lo, hi) {
                    let tag = if self.near_peak(s) {
                        RegionTag::Peak
                    } else {
                        RegionTag::of(b.region, rising)
                    };
                    out.push(self.make_root(s, tag, Some(b.region)));
                }
            }
        }
        if h1 > 0.0 {
            let lo = partition.upper_lo;
            let mut step = 1.0;
            let mut hi = lo + step;
            while self.phi_squared(hi) <= h1 {
                step *= 2.0;
                hi = lo + step;
            }
            if let Some(s) = refine_bracketed(f, lo, hi) {
                out.push(self.make_root(s, RegionTag::Upper, Some(Region::Upper)));
            }
        }
        out.sort_by(|a, b| b.sigma.total_cmp(&a.sigma));
        out
    }

    /// The stationary points `+-sqrt(H3/3)` of `P^d` (for `H3 > 0`), which
    /// do not correspond to primal critical points.
    pub fn spurious_points(&self) -> Vec<SpuriousPoint> {
        let h3 = self.constants.h3;
        if h3 <= 0.0 {
            return Vec::new();
        }
        let r = (h3 / 3.0).sqrt();
        [r, -r]
            .into_iter()
            .map(|sigma| {
                let x = self.x_of_sigma(sigma).ok();
                let gradient_norm = x
                    .as_ref()
                    .map(|x| crate::primal::norm(&self.spec.gradient(x)));
                SpuriousPoint {
                    sigma,
                    dual_derivative: self.dual_derivative(sigma).unwrap_or(0.0),
                    x,
                    gradient_norm,
                }
            })
            .collect()
    }
}

fn same_root(a: f64, b: f64) -> bool {
    (a - b).abs() <= tolerance::ROOT_MERGE * a.abs().max(1.0)
}

//! From dual roots to a labelled inventory of primal critical points.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use crate::dual::{
    DualCurve, DualRoot, DualSolution, PeakMagnitude, RegionPartition, RegionTag, SpuriousPoint,
};
use crate::error::{Error, Result};
use crate::oracle;
use crate::primal::{norm, Coefficients, DerivedConstants, ProblemSpec};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    GlobalMin,
    LocalMin,
    LocalMax,
    Inflection,
    UnclassifiedSaddle,
}

/// Whether a label follows from the dual region structure or only from a
/// numerical Hessian spectrum (advisory).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSource {
    Duality,
    HessianSpectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub x: Vec<f64>,
    pub sigma: f64,
    pub region_tag: RegionTag,
    pub label: Label,
    pub label_source: LabelSource,
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub gradient_norm: f64,
    /// Hessian eigenvalues, ascending.
    pub hessian_eigenvalues: Vec<f64>,
}

/// Sphere `|x - center|^2 = radius_squared`, the level set `y1(x) = y1_level`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldSolution {
    pub level_sigma: f64,
    pub y1_level: f64,
    pub center: Vec<f64>,
    pub radius_squared: f64,
    pub primal_value: f64,
    pub is_global_min: bool,
    /// Explicit points for `n = 1` (two, or one when the radius is zero).
    pub points: Vec<Vec<f64>>,
}

impl ManifoldSolution {
    /// Point on the sphere in the direction of `dir` (normalised here).
    pub fn point_along(&self, dir: &[f64]) -> Vec<f64> {
        let len = norm(dir);
        let r = self.radius_squared.sqrt();
        self.center
            .iter()
            .zip(dir)
            .map(|(c, d)| if len == 0.0 { *c } else { c + r * d / len })
            .collect()
    }

    /// Number of primal critical points the family contributes when `n = 1`.
    pub fn multiplicity_1d(&self) -> usize {
        if self.radius_squared > 0.0 {
            2
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointCount {
    pub count: usize,
    pub case: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalMin {
    pub value: f64,
    /// The minimizer when `h != 0`.
    pub x: Option<Vec<f64>>,
    pub sigma: Option<f64>,
    /// Levels of the minimizing families when `h = 0`.
    pub manifold_levels: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleAgreement {
    pub oracle_roots: usize,
    pub dual_points: usize,
    /// Largest relative distance between paired roots; absent when the
    /// counts differ.
    pub max_deviation: Option<f64>,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub max_duality_gap: f64,
    pub max_gradient_norm: f64,
    pub gradient_scale: f64,
    pub max_root_residual: f64,
    pub sturm_count: usize,
    pub bracket_count: usize,
    pub max_path_deviation: f64,
    pub paths_agree: bool,
    /// `n = 1`: every non-peak point has `Q(sigma) * P''(x) > 0`.
    pub curvature_consistent: Option<bool>,
    pub oracle: Option<OracleAgreement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub spec: Coefficients,
    pub dimension: usize,
    pub constants: DerivedConstants,
    pub regions: RegionPartition,
    pub peaks: Vec<PeakMagnitude>,
    pub roots: Vec<DualRoot>,
    pub points: Vec<CriticalPoint>,
    pub manifolds: Vec<ManifoldSolution>,
    pub count: CriticalPointCount,
    pub global_min: GlobalMin,
    pub verification: Verification,
    /// Stationary points of `P^d` that are not dual roots.
    pub spurious: Vec<SpuriousPoint>,
    pub rationale: Vec<String>,
}

/// Maps each dual root to `x(sigma)` and records primal/dual values.
/// Fails if the duality gap or the stationarity residual exceeds tolerance.
pub fn recover_critical_points(
    curve: &DualCurve,
    roots: &[DualRoot],
) -> Result<Vec<CriticalPoint>> {
    let spec = curve.spec();
    if spec.h_is_zero() {
        return Err(Error::ZeroLinearTerm);
    }
    let scale = oracle::gradient_scale(spec);
    roots
        .iter()
        .map(|root| {
            let x = curve.x_of_sigma(root.sigma)?;
            let primal_value = spec.eval_p(&x);
            let dual_value = curve.dual_value(root.sigma)?;
            let gap = (primal_value - dual_value).abs();
            let gap_limit = tolerance::DUALITY_GAP * primal_value.abs().max(1.0);
            if gap > gap_limit {
                return Err(Error::ToleranceBreach {
                    what: "duality gap",
                    value: gap,
                    limit: gap_limit,
                });
            }
            let gradient_norm = norm(&spec.gradient(&x));
            let grad_limit = tolerance::STATIONARITY * scale;
            if gradient_norm > grad_limit {
                return Err(Error::ToleranceBreach {
                    what: "gradient norm",
                    value: gradient_norm,
                    limit: grad_limit,
                });
            }
            let hessian_eigenvalues = eigenvalues(spec, &x);
            Ok(CriticalPoint {
                x,
                sigma: root.sigma,
                region_tag: root.tag,
                label: Label::UnclassifiedSaddle,
                label_source: LabelSource::HessianSpectrum,
                primal_value,
                dual_value,
                gap,
                gradient_norm,
                hessian_eigenvalues,
            })
        })
        .collect()
}

fn eigenvalues(spec: &ProblemSpec, x: &[f64]) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(spec.hessian(x))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// One-dimensional labels from the sub-interval each root falls in.
pub fn classify_1d(points: &mut [CriticalPoint]) {
    for p in points.iter_mut() {
        p.label = match p.region_tag {
            RegionTag::Upper => Label::GlobalMin,
            RegionTag::LowerFalling | RegionTag::NegativeRising | RegionTag::PositiveFalling => {
                Label::LocalMin
            }
            RegionTag::LowerRising | RegionTag::NegativeFalling | RegionTag::PositiveRising => {
                Label::LocalMax
            }
            RegionTag::Peak => Label::Inflection,
            RegionTag::HZeroFamily => Label::UnclassifiedSaddle,
        };
        p.label_source = LabelSource::Duality;
    }
}

/// The point whose root lies in the unbounded region is the global
/// minimizer; the rest are labelled from their Hessian spectrum.
pub fn classify_nd(points: &mut [CriticalPoint]) {
    for p in points.iter_mut() {
        if p.region_tag == RegionTag::Upper {
            p.label = Label::GlobalMin;
            p.label_source = LabelSource::Duality;
            continue;
        }
        let ev = &p.hessian_eigenvalues;
        let big = ev.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        p.label = if ev
            .iter()
            .any(|v| v.abs() <= tolerance::SINGULAR_HESSIAN * big)
        {
            Label::Inflection
        } else if ev.iter().all(|v| *v > 0.0) {
            Label::LocalMin
        } else if ev.iter().all(|v| *v < 0.0) {
            Label::LocalMax
        } else {
            Label::UnclassifiedSaddle
        };
        p.label_source = LabelSource::HessianSpectrum;
    }
}

/// Critical-point families for `h = 0`: the level sets `a1 y1 + b1 = s`
/// for `s` in `{0, H2, +sqrt H3, -sqrt H3}`, each a sphere around
/// `-b0/a0`. Suppressed families are explained in `rationale`.
pub fn solve_h_zero(
    spec: &ProblemSpec,
    rationale: &mut Vec<String>,
) -> Result<Vec<ManifoldSolution>> {
    if !spec.h_is_zero() {
        return Err(Error::NonZeroLinearTerm);
    }
    let DerivedConstants { h2, h3, h4, .. } = spec.derived_constants();
    let (a0, a1, a2) = (spec.a0(), spec.a1(), spec.a2());
    let center: Vec<f64> = spec.b0().iter().map(|b| -b / a0).collect();
    let b0_sq: f64 = spec.b0().iter().map(|b| b * b).sum();

    let mut candidates = vec![("0", 0.0), ("H2", h2)];
    if h3 >= 0.0 {
        candidates.push(("+sqrt(H3)", h3.sqrt()));
        candidates.push(("-sqrt(H3)", -h3.sqrt()));
    } else {
        rationale.push(format!("H3 = {h3} < 0: no +-sqrt(H3) families"));
    }

    let mut out: Vec<ManifoldSolution> = Vec::new();
    for (name, sigma) in candidates {
        if sigma < h2 {
            rationale.push(format!(
                "family {name} (sigma = {sigma}) lies below H2 = {h2}; empty"
            ));
            continue;
        }
        if out.iter().any(|m| m.level_sigma == sigma) {
            rationale.push(format!("family {name} coincides with sigma = {sigma}"));
            continue;
        }
        let y1_level = (sigma - spec.b1()) / a1;
        let mut radius_squared = if sigma == h2 {
            0.0
        } else {
            2.0 * (y1_level - spec.c0()) / a0 + b0_sq / (a0 * a0)
        };
        if radius_squared < 0.0 {
            let slack = 1e-12 * (y1_level.abs() + spec.c0().abs() + b0_sq).max(1.0);
            if radius_squared < -slack {
                rationale.push(format!(
                    "family {name} has negative radius^2 {radius_squared}; empty"
                ));
                continue;
            }
            radius_squared = 0.0;
        }
        let primal_value = match name {
            "0" => h4 + a2 * h3 * h3 / (8.0 * a1 * a1),
            "H2" => h4 + a2 * (h2 * h2 - h3).powi(2) / (8.0 * a1 * a1),
            _ => h4,
        };
        let points = if spec.dim() == 1 {
            let r = radius_squared.sqrt();
            if r > 0.0 {
                vec![vec![center[0] + r], vec![center[0] - r]]
            } else {
                vec![center.clone()]
            }
        } else {
            Vec::new()
        };
        out.push(ManifoldSolution {
            level_sigma: sigma,
            y1_level,
            center: center.clone(),
            radius_squared,
            primal_value,
            is_global_min: false,
            points,
        });
    }
    let best = out
        .iter()
        .map(|m| m.primal_value)
        .fold(f64::INFINITY, f64::min);
    for m in out.iter_mut() {
        m.is_global_min = m.primal_value <= best + 1e-12 * best.abs().max(1.0);
    }
    out.sort_by(|a, b| b.level_sigma.total_cmp(&a.level_sigma));
    Ok(out)
}

/// Number of critical points of the univariate profile, from the region
/// structure alone.
///
/// For `H1 = 0` this is `1 + 2 #{s in {0, +-sqrt H3} : s > H2}`; for
/// `H1 > 0` the unbounded region always contributes one point, a peak
/// strictly above `H1` contributes two and a peak touching `H1` one.
pub fn count_critical_points(
    constants: &DerivedConstants,
    peaks: &[PeakMagnitude],
) -> CriticalPointCount {
    let DerivedConstants { h1, h2, h3, .. } = *constants;
    if h1 == 0.0 {
        let mut levels = vec![0.0];
        if h3 >= 0.0 {
            for s in [h3.sqrt(), -h3.sqrt()] {
                if !levels.contains(&s) {
                    levels.push(s);
                }
            }
        }
        let above = levels.iter().filter(|&&s| s > h2).count();
        let re = constants.re_sqrt_h3();
        let case = if h2 < -re && -re < 0.0 {
            "H2 < Re(-sqrt(H3)) < 0"
        } else if -re <= h2 && h2 < 0.0 && re > 0.0 {
            "Re(-sqrt(H3)) <= H2 < 0"
        } else if 0.0 <= h2 && h2 < re {
            "0 <= H2 < Re(sqrt(H3))"
        } else if h2 < 0.0 && re == 0.0 {
            "H2 < 0 = Re(sqrt(H3))"
        } else if re < h2 {
            "0 <= Re(sqrt(H3)) < H2"
        } else {
            "boundary H2 = Re(sqrt(H3)) >= 0"
        };
        return CriticalPointCount {
            count: 1 + 2 * above,
            case: case.to_string(),
        };
    }
    let touch =
        |p: &PeakMagnitude| (p.phi_squared - h1).abs() <= tolerance::PEAK_TOUCH * h1.max(1.0);
    let touched = peaks.iter().filter(|p| touch(p)).count();
    let cleared = peaks
        .iter()
        .filter(|p| !touch(p) && p.phi_squared > h1)
        .count();
    let case = if peaks.is_empty() {
        "no bounded regions".to_string()
    } else if cleared == peaks.len() {
        "H1 below all peak magnitudes".to_string()
    } else if cleared == 0 && touched == 0 {
        "H1 above all peak magnitudes".to_string()
    } else {
        format!(
            "H1 clears {cleared} of {} peaks{}",
            peaks.len(),
            if touched > 0 {
                format!(", touches {touched} (inflection)")
            } else {
                String::new()
            }
        )
    };
    CriticalPointCount {
        count: 1 + 2 * cleared + touched,
        case,
    }
}

/// Full pipeline for one instance.
pub fn solve(spec: &ProblemSpec) -> Result<SolutionReport> {
    let curve = DualCurve::new(spec);
    let constants = *curve.constants();
    let regions = curve.region_partition();
    let peaks = curve.peak_magnitudes(&regions);
    let dual: DualSolution = curve.solve_dual_equation(&regions);
    let mut rationale = Vec::new();
    let scale = oracle::gradient_scale(spec);

    let mut points = Vec::new();
    let mut manifolds = Vec::new();
    let count;
    let global_min;
    let mut curvature_consistent = None;

    if spec.h_is_zero() {
        manifolds = solve_h_zero(spec, &mut rationale)?;
        let c = count_critical_points(&constants, &peaks);
        count = if spec.dim() == 1 {
            let n: usize = manifolds.iter().map(|m| m.multiplicity_1d()).sum();
            debug_assert_eq!(n, c.count);
            c
        } else {
            CriticalPointCount {
                count: manifolds.len(),
                case: format!(
                    "{} solution families; univariate profile case {}",
                    manifolds.len(),
                    c.case
                ),
            }
        };
        let best = manifolds.iter().filter(|m| m.is_global_min);
        global_min = GlobalMin {
            value: manifolds
                .iter()
                .map(|m| m.primal_value)
                .fold(f64::INFINITY, f64::min),
            x: None,
            sigma: None,
            manifold_levels: best.map(|m| m.level_sigma).collect(),
        };
    } else {
        points = recover_critical_points(&curve, &dual.roots)?;
        if spec.dim() == 1 {
            classify_1d(&mut points);
            curvature_consistent = Some(points.iter().all(|p| {
                p.region_tag == RegionTag::Peak
                    || curve.q_cubic(p.sigma) * p.hessian_eigenvalues[0] > 0.0
            }));
        } else {
            classify_nd(&mut points);
        }
        count = count_critical_points(&constants, &peaks);
        if count.count != points.len() {
            rationale.push(format!(
                "threshold count {} differs from recovered points {}",
                count.count,
                points.len()
            ));
        }
        let g =
            points
                .iter()
                .find(|p| p.label == Label::GlobalMin)
                .ok_or(Error::ToleranceBreach {
                    what: "roots in unbounded region",
                    value: 0.0,
                    limit: 1.0,
                })?;
        global_min = GlobalMin {
            value: g.primal_value,
            x: Some(g.x.clone()),
            sigma: Some(g.sigma),
            manifold_levels: Vec::new(),
        };
    }

    let oracle_agreement = if spec.dim() == 1 {
        let iso = oracle::isolate_derivative_roots(spec)?;
        let mut dual_x: Vec<f64> = if spec.h_is_zero() {
            manifolds
                .iter()
                .flat_map(|m| m.points.iter().map(|p| p[0]))
                .collect()
        } else {
            points.iter().map(|p| p.x[0]).collect()
        };
        dual_x.sort_by(f64::total_cmp);
        let matched_len = dual_x.len() == iso.refined_roots.len();
        let max_deviation = matched_len.then(|| {
            dual_x
                .iter()
                .zip(&iso.refined_roots)
                .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
                .fold(0.0, f64::max)
        });
        Some(OracleAgreement {
            oracle_roots: iso.refined_roots.len(),
            dual_points: dual_x.len(),
            max_deviation,
            matched: max_deviation.is_some_and(|d| d <= tolerance::ORACLE_AGREEMENT),
        })
    } else {
        None
    };

    let verification = Verification {
        max_duality_gap: points.iter().map(|p| p.gap).fold(0.0, f64::max),
        max_gradient_norm: points
            .iter()
            .map(|p| p.gradient_norm)
            .chain(
                manifolds
                    .iter()
                    .flat_map(|m| m.points.iter().map(|x| norm(&spec.gradient(x)))),
            )
            .fold(0.0, f64::max),
        gradient_scale: scale,
        max_root_residual: dual.roots.iter().map(|r| r.residual).fold(0.0, f64::max),
        sturm_count: dual.sturm_count,
        bracket_count: dual.bracket_count,
        max_path_deviation: dual.max_path_deviation,
        paths_agree: dual.paths_agree,
        curvature_consistent,
        oracle: oracle_agreement,
    };
    if !dual.paths_agree {
        rationale.push(format!(
            "Sturm route found {} roots, bracket route {}; bracket route kept",
            dual.sturm_count, dual.bracket_count
        ));
    }

    Ok(SolutionReport {
        spec: spec.coefficients().clone(),
        dimension: spec.dim(),
        constants,
        regions,
        peaks,
        roots: dual.roots,
        points,
        manifolds,
        count,
        global_min,
        verification,
        spurious: curve.spurious_points(),
        rationale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn worked_example_labels() {
        let r = solve(&instances::univariate()).unwrap();
        let labels: Vec<Label> = r.points.iter().map(|p| p.label).collect();
        assert_eq!(
            labels,
            vec![
                Label::GlobalMin,
                Label::LocalMin,
                Label::LocalMax,
                Label::LocalMax,
                Label::LocalMin,
                Label::LocalMin,
                Label::LocalMax,
            ]
        );
        assert_eq!(r.count.count, 7);
        assert_eq!(r.count.case, "H1 below all peak magnitudes");
        assert_eq!(r.verification.curvature_consistent, Some(true));
        assert!(r.verification.oracle.as_ref().unwrap().matched);
        assert!((r.global_min.sigma.unwrap() - 2.1299).abs() < 1e-3);
    }

    #[test]
    fn recover_requires_nonzero_h() {
        let spec = instances::univariate().with_h(vec![0.0]).unwrap();
        let curve = DualCurve::new(&spec);
        assert_eq!(
            recover_critical_points(&curve, &[]),
            Err(Error::ZeroLinearTerm)
        );
    }

    #[test]
    fn h_zero_rejects_nonzero_h() {
        let mut why = Vec::new();
        assert_eq!(
            solve_h_zero(&instances::univariate(), &mut why),
            Err(Error::NonZeroLinearTerm)
        );
    }

    #[test]
    fn h_zero_families_of_worked_example() {
        let spec = instances::univariate().with_h(vec![0.0]).unwrap();
        let mut why = Vec::new();
        let m = solve_h_zero(&spec, &mut why).unwrap();
        let levels: Vec<f64> = m.iter().map(|m| m.level_sigma).collect();
        assert_eq!(levels, vec![2.0, 0.0, -2.0, -4.0]);
        let values: Vec<f64> = m.iter().map(|m| m.primal_value).collect();
        assert_eq!(values, vec![-5.5, -3.5, -5.5, 12.5]);
        let global: Vec<bool> = m.iter().map(|m| m.is_global_min).collect();
        assert_eq!(global, vec![true, false, true, false]);

        let s3 = 3f64.sqrt();
        let s2 = 2f64.sqrt();
        let mut pts: Vec<f64> = m[0].points.iter().map(|p| p[0]).collect();
        pts.sort_by(f64::total_cmp);
        assert!(
            (pts[0] - (-3.0 - 2.0 * s3)).abs() < 1e-12
                && (pts[1] - (-3.0 + 2.0 * s3)).abs() < 1e-12
        );
        let mut pts: Vec<f64> = m[1].points.iter().map(|p| p[0]).collect();
        pts.sort_by(f64::total_cmp);
        assert!(
            (pts[0] - (-3.0 - 2.0 * s2)).abs() < 1e-12
                && (pts[1] - (-3.0 + 2.0 * s2)).abs() < 1e-12
        );
        let mut pts: Vec<f64> = m[2].points.iter().map(|p| p[0]).collect();
        pts.sort_by(f64::total_cmp);
        assert_eq!(pts, vec![-5.0, -1.0]);
        assert_eq!(m[3].points, vec![vec![-3.0]]);
        assert_eq!(m[3].radius_squared, 0.0);

        for fam in &m {
            for p in &fam.points {
                assert!((spec.eval_p(p) - fam.primal_value).abs() < 1e-10);
                assert!(spec.gradient(p)[0].abs() < 1e-10);
            }
        }
    }

    #[test]
    fn h_zero_suppresses_families_below_h2() {
        // H2 = 0.5 > 0, H3 = 4: only the +sqrt(H3) family and H2 itself.
        let mut c = instances::univariate().coefficients().clone();
        c.c0 = 3.0;
        c.h = vec![0.0];
        let spec = ProblemSpec::new(c).unwrap();
        assert_eq!(spec.derived_constants().h2, 0.5);
        let mut why = Vec::new();
        let m = solve_h_zero(&spec, &mut why).unwrap();
        let levels: Vec<f64> = m.iter().map(|m| m.level_sigma).collect();
        assert_eq!(levels, vec![2.0, 0.5]);
        assert_eq!(why.len(), 2);
        let r = solve(&spec).unwrap();
        assert_eq!(r.count.count, 3);
        assert_eq!(r.count.case, "0 <= H2 < Re(sqrt(H3))");
    }

    #[test]
    fn counts_for_worked_example_thresholds() {
        let spec = instances::univariate();
        let curve = DualCurve::new(&spec);
        let peaks = curve.peak_magnitudes(&curve.region_partition());
        let mut k = *curve.constants();
        assert_eq!(count_critical_points(&k, &peaks).count, 7);
        k.h1 = 400.0;
        let c = count_critical_points(&k, &peaks);
        assert_eq!(c.count, 1);
        assert_eq!(c.case, "H1 above all peak magnitudes");
        k.h1 = 0.0;
        let c = count_critical_points(&k, &peaks);
        assert_eq!(c.count, 7);
        assert_eq!(c.case, "H2 < Re(-sqrt(H3)) < 0");
        k.h1 = peaks[1].phi_squared;
        let c = count_critical_points(&k, &peaks);
        assert_eq!(c.count, 6);
        assert!(c.case.contains("touches 1"));
    }

    #[test]
    fn planar_global_min() {
        let r = solve(&instances::planar()).unwrap();
        let g = r.global_min.x.clone().unwrap();
        assert!(
            (g[0] + 0.525).abs() < 1e-3 && (g[1] - 2.475).abs() < 1e-3,
            "{g:?}"
        );
        assert_eq!(r.points.len(), 7);
        assert_eq!(r.points[0].label, Label::GlobalMin);
        assert!(r.points[1..]
            .iter()
            .all(|p| p.label_source == LabelSource::HessianSpectrum));
        assert!(r.verification.oracle.is_none());
    }
}

//! Sampled dual and primal curves as comma-separated tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use octic::classify::SolutionReport;
use octic::{DualCurve, ProblemSpec};
use serde::Serialize;

use crate::output::num;

pub struct CurveFiles {
    pub written: Vec<PathBuf>,
    pub poles: Vec<f64>,
}

/// FNV-1a over the canonical JSON form of the coefficients, so reformatting
/// an instance file does not change its identity.
pub fn instance_hash(spec: &ProblemSpec) -> u64 {
    let canonical = serde_json::to_string(spec).expect("coefficients serialize");
    canonical.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// `[H2 - 1, Re sqrt(H3) + max(3, 3 |H2|)]`.
pub fn default_sigma_range(spec: &ProblemSpec) -> (f64, f64) {
    let k = spec.derived_constants();
    (k.h2 - 1.0, k.re_sqrt_h3() + (3.0 * k.h2.abs()).max(3.0))
}

fn header(spec: &ProblemSpec, kind: &str) -> String {
    let k = spec.derived_constants();
    format!(
        "# {kind}\n# instance fnv1a64 {:016x}\n# H1 = {}, H2 = {}, H3 = {}, H4 = {}\n",
        instance_hash(spec),
        num(k.h1),
        num(k.h2),
        num(k.h3),
        num(k.h4)
    )
}

fn grid(lo: f64, hi: f64, samples: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (samples - 1) as f64;
    (0..samples).map(move |i| {
        if i + 1 == samples {
            hi
        } else {
            lo + step * i as f64
        }
    })
}

/// Uniform grid plus the structural points of the dual curve inside the
/// range: `H2`, `0`, `+-sqrt H3`, the peaks, `+-sqrt(H3/3)` and the roots.
/// Poles among them are bracketed by a pair of samples at relative
/// distance `1e-6` instead.
fn dual_grid(
    curve: &DualCurve,
    report: &SolutionReport,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Vec<f64> {
    let k = curve.constants();
    let mut features = vec![k.h2, 0.0];
    if k.h3 >= 0.0 {
        features.extend([
            k.h3.sqrt(),
            -k.h3.sqrt(),
            (k.h3 / 3.0).sqrt(),
            -(k.h3 / 3.0).sqrt(),
        ]);
    }
    features.extend(report.regions.bounded.iter().map(|b| b.peak));
    features.extend(report.roots.iter().map(|r| r.sigma));
    let mut out: Vec<f64> = grid(lo, hi, samples).collect();
    for f in features {
        if curve.dual_value(f).is_ok() {
            out.push(f);
        } else {
            let d = 1e-6 * f.abs().max(1.0);
            out.extend([f - d, f + d]);
        }
    }
    out.retain(|s| (lo..=hi).contains(s));
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| num(*a) == num(*b));
    out
}

fn label<T: Serialize>(t: &T) -> String {
    serde_json::to_value(t)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub fn write(
    spec: &ProblemSpec,
    report: &SolutionReport,
    (lo, hi): (f64, f64),
    samples: usize,
    dir: &Path,
) -> std::io::Result<CurveFiles> {
    std::fs::create_dir_all(dir)?;
    let curve = DualCurve::new(spec);
    let mut written = Vec::new();
    let mut poles = Vec::new();

    let mut rows = String::new();
    for sigma in dual_grid(&curve, report, lo, hi, samples) {
        match curve.dual_value(sigma) {
            Ok(pd) => {
                let _ = writeln!(
                    rows,
                    "{},{},{},{}",
                    num(sigma),
                    num(pd),
                    num(curve.phi_squared(sigma)),
                    num(curve.q_cubic(sigma))
                );
            }
            Err(_) => poles.push(sigma),
        }
    }
    let mut text = header(spec, "dual curve");
    for p in &poles {
        let _ = writeln!(text, "# omitted pole at sigma = {}", num(*p));
    }
    text.push_str("sigma,dual_value,phi_squared,q_value\n");
    text.push_str(&rows);
    let path = dir.join("dual.csv");
    std::fs::write(&path, text)?;
    written.push(path);

    if spec.dim() == 1 {
        let xs: Vec<f64> = report
            .points
            .iter()
            .map(|p| p.x[0])
            .chain(
                report
                    .manifolds
                    .iter()
                    .flat_map(|m| m.points.iter().map(|p| p[0])),
            )
            .collect();
        let (xmin, xmax) = xs
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
                (a.min(*x), b.max(*x))
            });
        let pad = 0.25 * (xmax - xmin).max(4.0);
        let mut text = header(spec, "primal curve");
        text.push_str("x,primal_value\n");
        for x in grid(xmin - pad, xmax + pad, samples) {
            let _ = writeln!(text, "{},{}", num(x), num(spec.eval_p(&[x])));
        }
        let path = dir.join("primal.csv");
        std::fs::write(&path, text)?;
        written.push(path);
    }

    let mut text = header(spec, "critical points");
    if report.manifolds.is_empty() {
        let xcols: Vec<String> = (0..spec.dim()).map(|i| format!("x{i}")).collect();
        let _ = writeln!(
            text,
            "sigma,{},primal_value,dual_value,label,region",
            xcols.join(",")
        );
        for p in &report.points {
            let xs: Vec<String> = p.x.iter().map(|v| num(*v)).collect();
            let _ = writeln!(
                text,
                "{},{},{},{},{},{}",
                num(p.sigma),
                xs.join(","),
                num(p.primal_value),
                num(p.dual_value),
                label(&p.label),
                label(&p.region_tag)
            );
        }
    } else {
        text.push_str("sigma,y1_level,radius_squared,primal_value,global_min\n");
        for m in &report.manifolds {
            let _ = writeln!(
                text,
                "{},{},{},{},{}",
                num(m.level_sigma),
                num(m.y1_level),
                num(m.radius_squared),
                num(m.primal_value),
                m.is_global_min
            );
        }
    }
    let path = dir.join("annotations.csv");
    std::fs::write(&path, text)?;
    written.push(path);

    Ok(CurveFiles { written, poles })
}

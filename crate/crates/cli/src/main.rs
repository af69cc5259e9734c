//! `octic`: enumerate, classify and verify the critical points of a nested
//! eighth-order polynomial instance.
//!
//! Exit codes: 0 ok, 2 input error, 3 tolerance breach, 4 verification
//! failure.

mod curves;
mod instance;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use octic::classify::{solve, SolutionReport};
use octic::oracle::{self, DescentConfig, DEFAULT_SEED};
use octic::{Error, ProblemSpec};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "octic",
    version,
    about = "Critical points of nested eighth-order polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: constants, regions, peaks, roots, labelled points.
    Solve(SolveArgs),
    /// Sample the dual (and, for n = 1, primal) curves to CSV files.
    Curves(CurvesArgs),
    /// Cross-check the report against the independent oracle.
    Verify(VerifyArgs),
    /// Number of critical points and the case that decides it.
    Count(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Instance file (JSON object).
    #[arg(long)]
    instance: PathBuf,
    /// Print only the machine-readable report.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurvesArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    sigma_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma_max: Option<f64>,
    #[arg(long, default_value_t = 1600)]
    samples: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Multistart descent starts (n >= 2).
    #[arg(long, default_value_t = 512)]
    starts: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

enum Failure {
    Input(String),
    Tolerance(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Tolerance(_) => 3,
            Failure::Verification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Tolerance(m) | Failure::Verification(m) => m,
        }
    }
}

fn load(path: &std::path::Path) -> Result<ProblemSpec, Failure> {
    instance::load(path).map_err(Failure::Input)
}

fn run_solve(spec: &ProblemSpec) -> Result<SolutionReport, Failure> {
    solve(spec).map_err(|e| match e {
        Error::ToleranceBreach { .. } | Error::Pole { .. } => Failure::Tolerance(e.to_string()),
        other => Failure::Input(other.to_string()),
    })
}

fn cmd_solve(args: &SolveArgs) -> Result<(), Failure> {
    let spec = load(&args.common.instance)?;
    let report = run_solve(&spec)?;
    let json = output::to_json(&report);
    if let Some(path) = &args.out {
        std::fs::write(path, &json)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    if args.common.json {
        print!("{json}");
    } else {
        print!("{}", output::report_table(&report));
    }
    Ok(())
}

fn cmd_curves(args: &CurvesArgs) -> Result<(), Failure> {
    let spec = load(&args.instance)?;
    let (dlo, dhi) = curves::default_sigma_range(&spec);
    let range = (args.sigma_min.unwrap_or(dlo), args.sigma_max.unwrap_or(dhi));
    if !(range.0.is_finite() && range.1.is_finite() && range.0 < range.1) {
        return Err(Failure::Input(format!(
            "bad sigma range [{}, {}]: need finite sigma-min < sigma-max",
            range.0, range.1
        )));
    }
    if args.samples < 2 {
        return Err(Failure::Input("--samples must be at least 2".into()));
    }
    let report = run_solve(&spec)?;
    let files = curves::write(&spec, &report, range, args.samples, &args.out)
        .map_err(|e| Failure::Input(format!("{}: {e}", args.out.display())))?;
    for p in &files.poles {
        eprintln!("omitted pole at sigma = {}", output::num(*p));
    }
    for f in &files.written {
        println!("{}", f.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct Check {
    name: String,
    value: f64,
    limit: f64,
    pass: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            pass: value <= limit,
        }
    }

    fn holds(name: &str, ok: bool) -> Self {
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            limit: 1.0,
            pass: ok,
        }
    }

    fn equal(name: &str, a: usize, b: usize) -> Self {
        Check {
            name: name.into(),
            value: a as f64,
            limit: b as f64,
            pass: a == b,
        }
    }
}

#[derive(Serialize)]
struct VerifySummary {
    pass: bool,
    summary: String,
    checks: Vec<Check>,
}

fn verify_checks(
    spec: &ProblemSpec,
    report: &SolutionReport,
    starts: usize,
    seed: u64,
) -> (Vec<Check>, String) {
    let v = &report.verification;
    let scale = v.gradient_scale;
    let gap = report
        .points
        .iter()
        .map(|p| p.gap / p.primal_value.abs().max(1.0))
        .fold(0.0, f64::max);
    let mut checks = vec![
        Check::at_most("duality gap (relative)", gap, octic::tolerance::DUALITY_GAP),
        Check::at_most(
            "gradient norm / scale",
            v.max_gradient_norm / scale,
            octic::tolerance::STATIONARITY,
        ),
        Check::at_most(
            "dual residual",
            v.max_root_residual / report.constants.h1.max(1.0),
            octic::tolerance::DUAL_RESIDUAL,
        ),
        Check::holds("sturm and bracket routes agree", v.paths_agree),
    ];

    if spec.dim() == 1 {
        let o = v.oracle.as_ref().expect("n = 1 carries oracle data");
        checks.push(Check::equal(
            "oracle root count",
            o.dual_points,
            o.oracle_roots,
        ));
        checks.push(Check::at_most(
            "oracle root deviation",
            o.max_deviation.unwrap_or(f64::MAX),
            octic::tolerance::ORACLE_AGREEMENT,
        ));
        checks.push(Check::equal(
            "threshold count",
            report.count.count,
            o.oracle_roots,
        ));
        if let Some(c) = v.curvature_consistent {
            checks.push(Check::holds("curvature sign agrees with Q", c));
        }
        let summary = format!("{} = {} roots matched", o.dual_points, o.oracle_roots);
        return (checks, summary);
    }

    let center: Vec<f64> = spec.b0().iter().map(|b| -b / spec.a0()).collect();
    let far = report
        .points
        .iter()
        .map(|p| {
            p.x.iter()
                .zip(&center)
                .map(|(a, c)| (a - c).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .chain(report.manifolds.iter().map(|m| m.radius_squared.sqrt()))
        .fold(0.0, f64::max);
    let reach = far + 2.0;
    let lower = center.iter().map(|c| c - reach).collect();
    let upper = center.iter().map(|c| c + reach).collect();
    let descent = oracle::multistart_descent(
        spec,
        &DescentConfig::new(starts, lower, upper).with_seed(seed),
    );
    let g = report.global_min.value;
    let worst = descent
        .converged_points
        .iter()
        .map(|p| p.gradient_norm)
        .fold(0.0, f64::max);
    checks.push(Check::at_most(
        "descent gradient norm / scale",
        worst / scale,
        octic::tolerance::STATIONARITY,
    ));
    checks.push(Check::at_most(
        "descent below global minimum",
        (g - descent.best_value) / g.abs().max(1.0),
        octic::tolerance::DUALITY_GAP,
    ));
    checks.push(Check::at_most(
        "descent best vs global minimum",
        (descent.best_value - g).abs() / g.abs().max(1.0),
        1e-6,
    ));
    if !report.manifolds.is_empty() {
        let n = spec.dim();
        let worst = report
            .manifolds
            .iter()
            .flat_map(|m| {
                (0..2 * n).map(move |k| {
                    let mut dir = vec![0.0; n];
                    dir[k / 2] = if k % 2 == 0 { 1.0 } else { -1.0 };
                    m.point_along(&dir)
                })
            })
            .map(|x| spec.gradient(&x).iter().map(|g| g * g).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        checks.push(Check::at_most(
            "manifold gradient norm",
            worst,
            octic::tolerance::STATIONARITY,
        ));
    }
    let summary = format!(
        "multistart ({} starts, seed {}) best {} vs global minimum {}",
        starts,
        descent.seed,
        output::num(descent.best_value),
        output::num(g)
    );
    (checks, summary)
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let spec = load(&args.common.instance)?;
    let report = run_solve(&spec)?;
    let (checks, detail) = verify_checks(&spec, &report, args.starts, args.seed);
    let first_fail = checks.iter().find(|c| !c.pass).map(|c| c.name.clone());
    let pass = first_fail.is_none();
    let summary = format!("{}, {detail}", if pass { "PASS" } else { "FAIL" });
    if args.common.json {
        print!(
            "{}",
            output::to_json(&VerifySummary {
                pass,
                summary: summary.clone(),
                checks
            })
        );
    } else {
        let rows: Vec<[String; 4]> = checks
            .iter()
            .map(|c| {
                [
                    c.name.clone(),
                    format!("{:.3e}", c.value),
                    format!("{:.3e}", c.limit),
                    if c.pass { "ok" } else { "FAIL" }.into(),
                ]
            })
            .collect();
        let mut out = String::new();
        output::table(&mut out, ["check", "value", "limit", ""], &rows);
        print!("{out}");
        println!("{summary}");
    }
    match first_fail {
        None => Ok(()),
        Some(name) => Err(Failure::Verification(format!(
            "verification failed: {name}"
        ))),
    }
}

fn cmd_count(args: &CommonArgs) -> Result<(), Failure> {
    let spec = load(&args.instance)?;
    let report = run_solve(&spec)?;
    if args.json {
        print!("{}", output::to_json(&report.count));
    } else {
        println!("{}", report.count.count);
        println!("case: {}", report.count.case);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Curves(a) => cmd_curves(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Count(a) => cmd_count(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

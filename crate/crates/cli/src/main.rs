//! Command-line front end: eigen/duality verification sweeps, fiber sampling
//! and the mean-curvature convergence table, with JSON/CSV/JSONL artifacts.
//!
//! Exit codes: 0 on success, 1 on verification failure, 2 on usage or
//! parameter errors.

mod config;

use clap::{Args, Parser, Subcommand};
use config::{RawArgs, RunConfig};
use eigenfiber::catalog::make_spec;
use eigenfiber::fiber::{constructive_zero, csv_header, csv_row, fiber_walk, jsonl_record};
use eigenfiber::matrix::Complex64;
use eigenfiber::spaces::{build_descriptor, Family, SpaceId};
use eigenfiber::verify::{
    duality_sweep, eigen_sweep, find_level_point, mean_curvature_at_level, mean_curvature_estimate,
    regular_value_report, verification_report,
};
use eigenfiber::{EigenSpec, Error};
use serde_json::{json, Value};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "eigenfiber",
    about = "Verify eigenfunction identities and minimal zero fibers on matrix symmetric spaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Space id "family:n" (e.g. slr-so:3) or bare family with --n
    #[arg(long)]
    space: Option<String>,
    /// Rank parameter, overrides the :n part of --space
    #[arg(long)]
    n: Option<usize>,
    /// Parameter vector, e.g. "1+2i,0,3-1i" (JSON array accepted)
    #[arg(long)]
    a: Option<String>,
    /// Second parameter vector for the two-parameter families
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Random group points per sweep
    #[arg(long)]
    points: Option<usize>,
    /// Fiber walk steps
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long = "step-size")]
    step_size: Option<f64>,
    /// Finite-difference step for the curvature oracle
    #[arg(long)]
    h: Option<f64>,
    /// Residual threshold for pass/fail decisions
    #[arg(long)]
    tol: Option<f64>,
    /// Level-set offset (0 = the zero fiber; 0.5 = negative control)
    #[arg(long)]
    level: Option<f64>,
    /// Output path; written atomically
    #[arg(long)]
    out: Option<String>,
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<String>,
}

impl CommonArgs {
    fn resolve(self) -> eigenfiber::Result<RunConfig> {
        RawArgs {
            space: self.space,
            n: self.n,
            a: self.a,
            b: self.b,
            seed: self.seed,
            points: self.points,
            steps: self.steps,
            step_size: self.step_size,
            h: self.h,
            tol: self.tol,
            level: self.level,
            out: self.out,
            config: self.config,
        }
        .resolve()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Verify the eigen identities and the dual spectrum
    Verify(CommonArgs),
    /// Fit the spectrum of the same function on the compact dual
    Duality(CommonArgs),
    /// Sample the zero fiber and certify regularity of every sample
    Fiber(CommonArgs),
    /// Mean-curvature convergence table over fiber points
    Curvature(CommonArgs),
    /// List the supported symmetric spaces
    ListSpaces,
}

/// Outcomes map to exit codes: Pass = 0, Fail = 1, usage errors = 2.
enum Outcome {
    Pass,
    Fail,
}

fn write_atomic(path: &str, content: &str) -> eigenfiber::Result<()> {
    let tmp = format!("{path}.tmp");
    std::fs::write(&tmp, content)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| Error::InvalidParameter(format!("cannot write {path}: {e}")))
}

fn emit(cfg: &RunConfig, value: &Value) -> eigenfiber::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable report");
    match &cfg.out {
        Some(path) => write_atomic(path, &(text + "\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn with_config(cfg: &RunConfig, report: Value) -> Value {
    let mut v = report;
    v["config"] = serde_json::to_value(cfg).expect("config serializes");
    v
}

fn spec_from_config(cfg: &RunConfig) -> eigenfiber::Result<EigenSpec> {
    let a = cfg.param_a()?;
    let b = cfg.param_b()?;
    make_spec(cfg.space_id.family, cfg.space_id.n, a, b)
}

fn cmd_verify(cfg: &RunConfig) -> eigenfiber::Result<Outcome> {
    let spec = spec_from_config(cfg)?;
    let eigen = eigen_sweep(&spec, cfg.points, cfg.seed)?;
    let dual = duality_sweep(&spec, cfg.points, cfg.seed)?;
    let report = verification_report(&spec, &eigen, Some(&dual), 0, vec![], cfg.seed);
    let mut pass = eigen.max_tau_residual <= cfg.tol && eigen.max_kappa_residual <= cfg.tol;
    pass &= (eigen.fitted_lambda - eigen.lambda_resolved).abs()
        <= 1e-7 * (1.0 + eigen.lambda_resolved.abs());
    pass &= eigen.lambda_spread <= 1e-7 * (1.0 + eigen.lambda_resolved.abs());
    pass &= (dual.fitted_lambda + eigen.lambda_resolved).abs() <= 1e-7;
    pass &= (dual.fitted_mu + spec.expected_mu).abs() <= 1e-7;
    let mut value = serde_json::to_value(&report).expect("report serializes");
    value["pass"] = json!(pass);
    emit(cfg, &with_config(cfg, value))?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_duality(cfg: &RunConfig) -> eigenfiber::Result<Outcome> {
    let spec = spec_from_config(cfg)?;
    let dual = duality_sweep(&spec, cfg.points, cfg.seed)?;
    let expected: Vec<f64> = spec.lambda_candidates.iter().map(|l| -l).collect();
    let pass = (dual.fitted_lambda - dual.lambda_resolved).abs() <= 1e-7
        && (dual.fitted_mu + spec.expected_mu).abs() <= 1e-7
        && dual.max_tau_residual <= cfg.tol
        && dual.max_kappa_residual <= cfg.tol;
    let value = json!({
        "space": spec.space.to_string(),
        "dual_space": dual.space.to_string(),
        "points": dual.points,
        "dual_lambda": dual.fitted_lambda,
        "dual_mu": dual.fitted_mu,
        "expected_lambda_candidates": expected,
        "expected_mu": -spec.expected_mu,
        "max_tau_residual": dual.max_tau_residual,
        "max_kappa_residual": dual.max_kappa_residual,
        "seed": cfg.seed,
        "pass": pass,
    });
    emit(cfg, &with_config(cfg, value))?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn require_theorem_conditions(spec: &EigenSpec) -> eigenfiber::Result<()> {
    if let Some(violation) = spec.theorem_violation() {
        return Err(Error::InvalidParameter(format!(
            "parameters do not satisfy the zero-fiber theorem conditions: {violation}"
        )));
    }
    Ok(())
}

fn cmd_fiber(cfg: &RunConfig) -> eigenfiber::Result<Outcome> {
    let spec = spec_from_config(cfg)?;
    require_theorem_conditions(&spec)?;
    let d = build_descriptor(spec.space)?;
    let start = constructive_zero(&spec, &d)?;
    let walk = fiber_walk(&spec, &d, &start, cfg.steps, cfg.step_size, cfg.seed)?;
    let mut samples = vec![start];
    samples.extend(walk);
    let report = regular_value_report(&spec, &d, &samples, 1e-6)?;
    let pass = report.regular == report.total;

    let body = match cfg.out.as_deref().map(|p| p.ends_with(".csv")) {
        Some(true) => {
            let mut text = csv_header(spec.f.size()) + "\n";
            for (i, fp) in samples.iter().enumerate() {
                text.push_str(&csv_row(i, fp));
                text.push('\n');
            }
            text
        }
        _ => {
            let mut text = String::new();
            for (i, fp) in samples.iter().enumerate() {
                text.push_str(&jsonl_record(i, fp).to_string());
                text.push('\n');
            }
            text
        }
    };
    match &cfg.out {
        Some(path) => write_atomic(path, &body)?,
        None => print!("{body}"),
    }
    let summary = json!({
        "space": spec.space.to_string(),
        "samples": report.total,
        "regular": report.regular,
        "min_margin_ratio": report.min_margin_ratio,
        "max_phi_abs": samples.iter().map(|s| s.phi_abs).fold(0.0, f64::max),
        "max_membership_residual": samples
            .iter()
            .map(|s| s.point.membership_residual)
            .fold(0.0, f64::max),
        "seed": cfg.seed,
        "pass": pass,
        "config": serde_json::to_value(cfg).expect("config serializes"),
    });
    let mut err = std::io::stderr();
    writeln!(
        err,
        "{}",
        serde_json::to_string(&summary).expect("summary serializes")
    )
    .ok();
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_curvature(cfg: &RunConfig) -> eigenfiber::Result<Outcome> {
    if cfg.h <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "--h must be positive, got {}",
            cfg.h
        )));
    }
    let spec = spec_from_config(cfg)?;
    require_theorem_conditions(&spec)?;
    let d = build_descriptor(spec.space)?;
    let start = constructive_zero(&spec, &d)?;
    let level = Complex64::new(cfg.level, 0.0);
    let hs = [cfg.h, cfg.h / 2.0, cfg.h / 4.0];
    let floor = 2e-7;

    let mut rows = Vec::new();
    let mut pass = true;
    if cfg.level == 0.0 {
        let walk = fiber_walk(&spec, &d, &start, 8, 0.08, cfg.seed)?;
        let points: Vec<_> = std::iter::once(&start)
            .chain(walk.iter().step_by(2))
            .take(5)
            .collect();
        for (i, p) in points.iter().enumerate() {
            let values: eigenfiber::Result<Vec<f64>> = hs
                .iter()
                .map(|h| mean_curvature_estimate(&spec, &d, p, *h))
                .collect();
            let values = values?;
            let decreasing = values.windows(2).all(|w| w[1] <= (0.6 * w[0]).max(floor));
            let below = values[values.len() - 1] <= 5e-3;
            pass &= decreasing && below;
            rows.push(json!({
                "point": i,
                "h": hs,
                "mean_curvature": values,
                "decreasing": decreasing,
                "below_threshold": below,
            }));
        }
    } else {
        // negative control: a non-zero level set is not expected to be minimal
        let anchor = find_level_point(&spec, &d, &start.point.matrix, level)?;
        let values: eigenfiber::Result<Vec<f64>> = hs
            .iter()
            .map(|h| mean_curvature_at_level(&spec, &d, &anchor.matrix, *h, level))
            .collect();
        let values = values?;
        let below = values[values.len() - 1] <= 5e-3;
        pass = below; // fails by design on non-minimal level sets
        rows.push(json!({
            "point": 0,
            "level": cfg.level,
            "h": hs,
            "mean_curvature": values,
            "below_threshold": below,
        }));
    }
    let value = json!({
        "space": spec.space.to_string(),
        "level": cfg.level,
        "table": rows,
        "pass": pass,
        "seed": cfg.seed,
    });
    emit(cfg, &with_config(cfg, value))?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_list_spaces() -> Outcome {
    println!(
        "{:<14} {:>3} {:>8} {:>6} {:>6}  description",
        "space", "n", "ambient", "dim k", "dim p"
    );
    for family in Family::ALL {
        let n = family.min_n();
        let id = SpaceId::new(family, n).expect("minimal n is valid");
        let d = build_descriptor(id).expect("descriptor builds");
        let kind = if family.is_compact() {
            "compact dual"
        } else {
            "non-compact"
        };
        println!(
            "{:<14} {:>3} {:>8} {:>6} {:>6}  {} (n >= {})",
            family.token(),
            n,
            d.ambient_size,
            d.dim_k(),
            d.dim_p(),
            kind,
            family.min_n()
        );
    }
    Outcome::Pass
}

fn run(command: Command) -> eigenfiber::Result<Outcome> {
    match command {
        Command::Verify(args) => cmd_verify(&args.resolve()?),
        Command::Duality(args) => cmd_duality(&args.resolve()?),
        Command::Fiber(args) => cmd_fiber(&args.resolve()?),
        Command::Curvature(args) => cmd_curvature(&args.resolve()?),
        Command::ListSpaces => Ok(cmd_list_spaces()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParameter(_)
                | Error::ParseComplex(_)
                | Error::DimensionMismatch { .. }
                | Error::IndexOutOfRange { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

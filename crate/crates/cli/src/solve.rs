//! `extremal solve`: enclosing, inscribed, and fixed-center dual problems.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use extremal_ellipsoids::{
    multistart_uniqueness, solve_max_inscribed, solve_max_inscribed_fixed_center_dual,
    solve_min_enclosing, ProblemSpec, SizeFunction, SolveResult, SolverConfig, UniquenessReport,
};

use crate::output::Sink;
use crate::probe::parse_size;
use crate::{CliError, CmdResult};

#[derive(Args)]
pub struct SolveArgs {
    /// Problem JSON: {"points": [[...]]} or {"halfspaces": [{"a": [...], "b": ...}]},
    /// optionally with "fixed_center": [...]
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Size function: volume | sum | sqrt_sum | pnorm:Q | square_counterexample | arc_length
    #[arg(long)]
    f: String,
    /// Elliptic modulus convention for arc_length
    #[arg(long, value_parser = ["eccentric", "paper"])]
    modulus: Option<String>,
    #[arg(long, value_parser = ["enclose", "inscribe", "inscribe-dual"], default_value = "enclose")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent perturbed starts; 8 or more adds a uniqueness report
    #[arg(long, default_value_t = 1)]
    multistart: u32,
    /// Directory for the summary JSON (stdout always mirrors it)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SolveSummary {
    command: &'static str,
    mode: String,
    f: String,
    seed: u64,
    multistart: u32,
    result: SolveResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    uniqueness: Option<UniquenessReport>,
}

fn dispatch(
    mode: &str,
    spec: &ProblemSpec,
    f: &SizeFunction,
    cfg: &SolverConfig,
) -> Result<SolveResult, CliError> {
    match mode {
        "enclose" => {
            let points = spec.point_vectors()?;
            Ok(solve_min_enclosing(&points, f, cfg)?)
        }
        "inscribe" => {
            let poly = spec.polytope()?;
            Ok(solve_max_inscribed(
                &poly,
                f,
                cfg,
                spec.fixed_center.as_deref(),
            )?)
        }
        "inscribe-dual" => {
            let poly = spec.polytope()?;
            let center = spec.fixed_center.as_deref().ok_or_else(|| {
                CliError::Usage("inscribe-dual needs \"fixed_center\" in the problem JSON".into())
            })?;
            Ok(solve_max_inscribed_fixed_center_dual(&poly, center, f)?)
        }
        _ => unreachable!("clap validated the mode"),
    }
}

pub fn run(args: SolveArgs) -> CmdResult {
    let sink = Sink::new(args.out.clone())?;
    let f = parse_size(&args.f, args.modulus.as_deref())?;
    let text = fs::read_to_string(&args.input)?;
    let spec: ProblemSpec = serde_json::from_str(&text)?;
    spec.validate()?;

    let cfg = SolverConfig {
        multistart: args.multistart.max(1),
        seed: args.seed,
        ..SolverConfig::default()
    };
    let result = dispatch(&args.mode, &spec, &f, &cfg)?;

    // enough independent starts to say something about uniqueness
    let uniqueness = if args.multistart >= 8 && args.mode != "inscribe-dual" {
        Some(multistart_uniqueness(
            &spec,
            &f,
            args.multistart,
            args.seed,
        )?)
    } else {
        None
    };

    let summary = SolveSummary {
        command: "solve",
        mode: args.mode,
        f: f.name(),
        seed: args.seed,
        multistart: args.multistart,
        result,
        uniqueness,
    };
    sink.summary("solve_summary.json", &summary)?;
    Ok(0)
}

//! `extremal between`: containment checks for the interpolation family of a
//! user-supplied pair of ellipsoids.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use extremal_ellipsoids::{
    check_dual_pair, check_hull_containment, check_intersection_enclosure, default_lambda_grid,
    AffineMap, QuadricEllipsoid,
};

use crate::output::{fmt_float, Sink};
use crate::{CliError, CmdResult};

#[derive(Args)]
pub struct BetweenArgs {
    /// Pair JSON: {"family": "image"|"preimage"|"dual", "e0": {"center": [...],
    /// "shape": [[...]]}, "e1": {...}, "lambdas": [...]?}
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
struct PairInput {
    family: String,
    e0: QuadricEllipsoid,
    e1: QuadricEllipsoid,
    #[serde(default)]
    lambdas: Option<Vec<f64>>,
    #[serde(default)]
    dirs: Option<usize>,
    #[serde(default)]
    samples: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Serialize)]
struct BetweenSummary {
    command: &'static str,
    family: String,
    lambda_grid: Vec<f64>,
    violations: u64,
    report: serde_json::Value,
    /// Worst grid entry when the family was violated, for replay.
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<serde_json::Value>,
}

/// Preimage form of a quadric: P = A^{1/2}, t = -P m.
fn preimage_of(q: &QuadricEllipsoid) -> Result<AffineMap, CliError> {
    let p = q.shape().sym_eigen()?.spectral_map(f64::sqrt);
    let t = -p.mul_vec(q.center());
    Ok(AffineMap::preimage(p, t.iter().copied().collect())?)
}

pub fn run(args: BetweenArgs) -> CmdResult {
    let sink = Sink::new(args.out.clone())?;
    let text = fs::read_to_string(&args.input)?;
    let input: PairInput = serde_json::from_str(&text)?;
    let grid = input.lambdas.clone().unwrap_or_else(default_lambda_grid);
    let dirs = input.dirs.unwrap_or(128);

    let (violations, report, csv_rows, witness) = match input.family.as_str() {
        "image" => {
            let (e0, e1) = (input.e0.to_affine(), input.e1.to_affine());
            let rep = check_hull_containment(&e0, &e1, &grid, dirs)?;
            let rows: Vec<String> = rep
                .entries
                .iter()
                .map(|e| format!("{},{},{}", fmt_float(e.lambda), fmt_float(e.margin), e.ok))
                .collect();
            let witness = rep
                .entries
                .iter()
                .filter(|e| !e.ok)
                .min_by(|a, b| a.margin.partial_cmp(&b.margin).unwrap())
                .map(serde_json::to_value)
                .transpose()?;
            (rep.violations, serde_json::to_value(&rep)?, rows, witness)
        }
        "preimage" => {
            let (e0, e1) = (preimage_of(&input.e0)?, preimage_of(&input.e1)?);
            let rep = check_intersection_enclosure(
                &e0,
                &e1,
                &grid,
                input.samples.unwrap_or(64),
                input.seed.unwrap_or(0),
            )?;
            let rows: Vec<String> = rep
                .entries
                .iter()
                .map(|e| {
                    format!(
                        "{},{},{}",
                        fmt_float(e.lambda),
                        fmt_float(e.worst_slack),
                        e.ok
                    )
                })
                .collect();
            let witness = rep
                .entries
                .iter()
                .filter(|e| !e.ok)
                .min_by(|a, b| a.worst_slack.partial_cmp(&b.worst_slack).unwrap())
                .map(serde_json::to_value)
                .transpose()?;
            (rep.violations, serde_json::to_value(&rep)?, rows, witness)
        }
        "dual" => {
            let (e0, e1) = (input.e0.to_dual()?, input.e1.to_dual()?);
            let rep = check_dual_pair(&e0, &e1, &grid, dirs)?;
            let rows: Vec<String> = rep
                .entries
                .iter()
                .map(|e| {
                    let margin = e.margin.map(fmt_float).unwrap_or_default();
                    format!("{},{margin},{}", fmt_float(e.lambda), e.is_ellipsoid)
                })
                .collect();
            let witness = rep
                .entries
                .iter()
                .filter(|e| e.margin.is_some_and(|m| m < -1e-9))
                .min_by(|a, b| a.margin.partial_cmp(&b.margin).unwrap())
                .map(serde_json::to_value)
                .transpose()?;
            (rep.violations, serde_json::to_value(&rep)?, rows, witness)
        }
        other => {
            return Err(CliError::Usage(format!(
                "family must be image, preimage or dual, got `{other}`"
            )));
        }
    };

    sink.csv("between_entries.csv", "lambda,value,flag", &csv_rows)?;
    let summary = BetweenSummary {
        command: "between",
        family: input.family,
        lambda_grid: grid,
        violations,
        report,
        witness,
    };
    sink.summary("between_summary.json", &summary)?;
    Ok(if violations > 0 { 3 } else { 0 })
}

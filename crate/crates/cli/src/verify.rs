//! `extremal verify`: batch containment checks for the three interpolation
//! families, plus a delegation path to the convexity probe.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use extremal_ellipsoids::instances::{
    random_dual_pair, random_image_pair, random_overlapping_preimage_pair,
};
use extremal_ellipsoids::sample::rng_from_seed;
use extremal_ellipsoids::{
    check_dual_pair, check_hull_containment, check_intersection_enclosure, default_lambda_grid,
};

use crate::output::{fmt_float, indexed_map, item_seed, Sink};
use crate::{probe, CliError, CmdResult};

#[derive(Args)]
pub struct VerifyArgs {
    /// Interpolation family to check: 1 (image hull), 2 (preimage
    /// intersection), 4 (dual hull, 2D only)
    #[arg(long)]
    lemma: Option<u32>,
    /// Ambient dimension (2 or 3; the dual check accepts 2 only)
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Seeded pairs to generate
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the pair batch
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Run the convexity probe on this size function instead of a lemma batch
    #[arg(long, value_name = "NAME")]
    probe: Option<String>,
    /// Power-map exponent for --probe
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    /// Property for --probe: convex | concave
    #[arg(long)]
    property: Option<String>,
    #[arg(long, value_parser = ["eccentric", "paper"])]
    modulus: Option<String>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Serialize, Clone)]
struct Witness {
    pair: usize,
    pair_seed: u64,
    lambda: f64,
    margin: f64,
    e0: serde_json::Value,
    e1: serde_json::Value,
}

struct PairRow {
    margin: Option<f64>,
    violations: u64,
    vacuous: bool,
    witness: Option<Witness>,
}

#[derive(Serialize)]
struct VerifySummary {
    command: &'static str,
    lemma: u32,
    d: usize,
    trials: u64,
    seed: u64,
    lambda_grid: Vec<f64>,
    n_dirs: usize,
    violations_total: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    worst_margin: Option<f64>,
    vacuous_pairs: u64,
    /// First violating pair, serialized for replay.
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Witness>,
}

const N_DIRS: usize = 128;

fn hull_pair(index: usize, seed: u64, d: usize, grid: &[f64]) -> Result<PairRow, CliError> {
    let pair_seed = item_seed(seed, index);
    let mut rng = rng_from_seed(pair_seed);
    let (e0, e1) = random_image_pair(&mut rng, d);
    let rep = check_hull_containment(&e0, &e1, grid, N_DIRS)?;
    let witness = if rep.violations > 0 {
        let worst = rep
            .entries
            .iter()
            .filter(|e| !e.ok)
            .min_by(|a, b| a.margin.partial_cmp(&b.margin).unwrap())
            .expect("violations imply a failing entry");
        Some(Witness {
            pair: index,
            pair_seed,
            lambda: worst.lambda,
            margin: worst.margin,
            e0: serde_json::to_value(&e0)?,
            e1: serde_json::to_value(&e1)?,
        })
    } else {
        None
    };
    Ok(PairRow {
        margin: Some(rep.worst_margin),
        violations: rep.violations,
        vacuous: false,
        witness,
    })
}

fn intersection_pair(index: usize, seed: u64, d: usize, grid: &[f64]) -> Result<PairRow, CliError> {
    let pair_seed = item_seed(seed, index);
    let mut rng = rng_from_seed(pair_seed);
    let (e0, e1) = random_overlapping_preimage_pair(&mut rng, d);
    let rep = check_intersection_enclosure(&e0, &e1, grid, 64, item_seed(pair_seed, 1))?;
    if rep.vacuous {
        return Ok(PairRow {
            margin: None,
            violations: 0,
            vacuous: true,
            witness: None,
        });
    }
    let worst = rep
        .entries
        .iter()
        .min_by(|a, b| a.worst_slack.partial_cmp(&b.worst_slack).unwrap())
        .expect("non-vacuous reports have entries");
    let witness = if rep.violations > 0 {
        Some(Witness {
            pair: index,
            pair_seed,
            lambda: worst.lambda,
            margin: worst.worst_slack,
            e0: serde_json::to_value(&e0)?,
            e1: serde_json::to_value(&e1)?,
        })
    } else {
        None
    };
    Ok(PairRow {
        margin: Some(worst.worst_slack),
        violations: rep.violations,
        vacuous: false,
        witness,
    })
}

fn dual_pair(index: usize, seed: u64, grid: &[f64]) -> Result<PairRow, CliError> {
    let pair_seed = item_seed(seed, index);
    let mut rng = rng_from_seed(pair_seed);
    let (e0, e1) = random_dual_pair(&mut rng);
    let rep = check_dual_pair(&e0, &e1, grid, N_DIRS)?;
    let witness = if rep.violations > 0 {
        let worst = rep
            .entries
            .iter()
            .filter(|e| e.margin.is_some_and(|m| m < -1e-9))
            .min_by(|a, b| a.margin.partial_cmp(&b.margin).unwrap())
            .expect("violations imply a failing entry");
        Some(Witness {
            pair: index,
            pair_seed,
            lambda: worst.lambda,
            margin: worst.margin.unwrap(),
            e0: serde_json::to_value(&e0)?,
            e1: serde_json::to_value(&e1)?,
        })
    } else {
        None
    };
    Ok(PairRow {
        margin: rep.worst_margin,
        violations: rep.violations,
        vacuous: false,
        witness,
    })
}

pub fn run(args: VerifyArgs) -> CmdResult {
    // --probe delegates wholesale to the probe subcommand
    if let Some(name) = args.probe {
        let p = args
            .p
            .ok_or_else(|| CliError::Usage("--probe needs --p EXPONENT".into()))?;
        return probe::run(probe::ProbeArgs {
            f: name,
            p,
            property: args.property.unwrap_or_else(|| "convex".into()),
            domain: "both".into(),
            d: None,
            trials: args.trials,
            seed: args.seed,
            modulus: args.modulus,
            out: args.out,
        });
    }

    let lemma = args
        .lemma
        .ok_or_else(|| CliError::Usage("pass --lemma {1,2,4} or --probe NAME".into()))?;
    match lemma {
        1 | 2 => {
            if !(args.d == 2 || args.d == 3) {
                return Err(CliError::Usage(format!(
                    "--lemma {lemma} supports --d 2 or --d 3, got {}",
                    args.d
                )));
            }
        }
        4 => {
            if args.d != 2 {
                return Err(CliError::Usage(
                    "the dual interpolation check is two-dimensional; use --d 2".into(),
                ));
            }
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown lemma {other}; known checks are 1, 2 and 4"
            )));
        }
    }

    let sink = Sink::new(args.out.clone())?;
    let grid: Vec<f64> = match lemma {
        // eleven evenly spaced weights across the whole family
        1 | 2 => (0..=10).map(|i| i as f64 / 10.0).collect(),
        // the dual check walks the near-endpoint prefix of this finer grid
        _ => default_lambda_grid(),
    };

    let n = args.trials as usize;
    let rows: Vec<Result<PairRow, CliError>> = indexed_map(n, args.jobs, |i| match lemma {
        1 => hull_pair(i, args.seed, args.d, &grid),
        2 => intersection_pair(i, args.seed, args.d, &grid),
        _ => dual_pair(i, args.seed, &grid),
    });

    let mut csv_rows = Vec::with_capacity(n);
    let mut violations_total = 0;
    let mut worst_margin: Option<f64> = None;
    let mut vacuous_pairs = 0;
    let mut witness = None;
    for (i, row) in rows.into_iter().enumerate() {
        let row = row?;
        let margin_cell = row.margin.map(fmt_float).unwrap_or_default();
        csv_rows.push(format!(
            "{i},{margin_cell},{},{}",
            row.violations, row.vacuous
        ));
        violations_total += row.violations;
        if let Some(m) = row.margin {
            worst_margin = Some(worst_margin.map_or(m, |w| w.min(m)));
        }
        vacuous_pairs += row.vacuous as u64;
        if witness.is_none() {
            witness = row.witness;
        }
    }

    sink.csv(
        "verify_pairs.csv",
        "pair,worst_margin,violations,vacuous",
        &csv_rows,
    )?;
    let summary = VerifySummary {
        command: "verify",
        lemma,
        d: args.d,
        trials: args.trials,
        seed: args.seed,
        lambda_grid: grid,
        n_dirs: N_DIRS,
        violations_total,
        worst_margin,
        vacuous_pairs,
        witness,
    };
    sink.summary("verify_summary.json", &summary)?;
    Ok(if violations_total > 0 { 3 } else { 0 })
}

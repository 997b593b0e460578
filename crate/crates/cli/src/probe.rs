//! `extremal probe`: randomized convexity/concavity verdicts for f ∘ w^p.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use extremal_ellipsoids::{
    convexity_probe, ModulusConvention, ProbeDomain, ProbeReport, Property, SizeFunction,
};

use crate::output::Sink;
use crate::{CliError, CmdResult};

/// Parses a size function name plus the optional modulus override used by
/// several subcommands ("paper" picks the one-minus-ratio modulus).
pub fn parse_size(name: &str, modulus: Option<&str>) -> Result<SizeFunction, CliError> {
    let f = SizeFunction::parse(name)?;
    Ok(match (f, modulus) {
        (SizeFunction::ArcLength(_), Some("paper")) => {
            SizeFunction::ArcLength(ModulusConvention::OneMinusRatio)
        }
        // eccentric is the parsed default; the flag is inert off arc_length
        (f, _) => f,
    })
}

#[derive(Args)]
pub struct ProbeArgs {
    /// Size function under test
    #[arg(long)]
    pub f: String,
    /// Exponent of the componentwise power map the function is composed with
    #[arg(long, allow_negative_numbers = true)]
    pub p: f64,
    #[arg(long, value_parser = ["convex", "concave"], default_value = "convex")]
    pub property: String,
    /// Domain to draw segments from; `both` runs positive vectors and
    /// matrices and compares the verdicts
    #[arg(long, value_parser = ["positive", "nonnegative", "matrices", "both"], default_value = "both")]
    pub domain: String,
    /// Ambient dimension (defaults to the function's own, else 2)
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = ["eccentric", "paper"])]
    pub modulus: Option<String>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ProbeSummary {
    command: &'static str,
    f: String,
    p: f64,
    property: String,
    dim: usize,
    trials: u64,
    seed: u64,
    reports: Vec<ProbeReport>,
    /// Whether every probed domain reached the same verdict; absent when a
    /// single domain was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    verdicts_agree: Option<bool>,
    violations_total: u64,
}

pub fn run(args: ProbeArgs) -> CmdResult {
    let sink = Sink::new(args.out.clone())?;
    let f = parse_size(&args.f, args.modulus.as_deref())?;
    let property = Property::parse(&args.property)?;
    let dim = args.d.or(f.declared_dim()).unwrap_or(2);

    let domains: Vec<ProbeDomain> = match args.domain.as_str() {
        "both" => vec![ProbeDomain::Positive, ProbeDomain::Matrices],
        one => vec![ProbeDomain::parse(one)?],
    };
    let reports: Vec<ProbeReport> = domains
        .iter()
        .map(|&d| convexity_probe(&f, args.p, property, d, dim, args.trials, args.seed))
        .collect::<Result<_, _>>()?;

    let verdicts_agree = (reports.len() > 1).then(|| {
        reports
            .windows(2)
            .all(|w| w[0].verdict_holds() == w[1].verdict_holds())
    });
    let violations_total = reports.iter().map(|r| r.violations).sum();

    let summary = ProbeSummary {
        command: "probe",
        f: f.name(),
        p: args.p,
        property: args.property,
        dim,
        trials: args.trials,
        seed: args.seed,
        reports,
        verdicts_agree,
        violations_total,
    };
    sink.summary("probe_summary.json", &summary)?;
    Ok(if violations_total > 0 { 3 } else { 0 })
}

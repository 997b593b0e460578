//! `extremal`: command-line driver for extremal-ellipsoid computations.
//!
//! Exit codes: 0 success, 1 usage or input errors, 2 infeasible geometry
//! caught in preflight, 3 at least one property violation (the summary then
//! carries a serialized witness). No other codes are emitted.

mod between;
mod output;
mod probe;
mod repro;
mod solve;
mod verify;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use extremal_ellipsoids::Error as LibError;

#[derive(Parser)]
#[command(
    name = "extremal",
    version,
    about = "Extremal ellipsoids of convex bodies under general size functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an enclosing or inscribed extremal-ellipsoid problem from JSON
    Solve(solve::SolveArgs),
    /// Re-check containment families or a convexity probe over seeded batches
    Verify(verify::VerifyArgs),
    /// Probe convexity/concavity of a size function composed with a power map
    Probe(probe::ProbeArgs),
    /// Check the interpolation family between two given ellipsoids
    Between(between::BetweenArgs),
    /// Scan the pencil of ellipses through the corners of a square
    ReproSquare(repro::SquareArgs),
    /// Scan the symmetric family of ellipses inscribed in a unit triangle
    ReproTriangle(repro::TriangleArgs),
}

/// Errors carrying their process exit code.
pub enum CliError {
    /// Bad flags, unreadable/unparsable input, unknown names.
    Usage(String),
    /// Geometry rejected by a preflight check (unbounded, empty, bad center).
    Infeasible(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Infeasible(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Infeasible(m) => m,
        }
    }
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        match e {
            LibError::Unbounded { .. }
            | LibError::EmptyInterior { .. }
            | LibError::CenterNotInterior { .. }
            | LibError::OriginNotInterior { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("invalid JSON: {e}"))
    }
}

/// Commands return 0, or 3 when they found violations worth a witness.
type CmdResult = Result<i32, CliError>;

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => solve::run(args),
        Command::Verify(args) => verify::run(args),
        Command::Probe(args) => probe::run(args),
        Command::Between(args) => between::run(args),
        Command::ReproSquare(args) => repro::run_square(args),
        Command::ReproTriangle(args) => repro::run_triangle(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

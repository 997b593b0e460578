//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by representation, size-function and solver operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("ellipsoid dimension {0} outside supported range 1..=16")]
    DimensionOutOfRange(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("asymmetric matrix input: |S[{i}][{j}] - S[{j}][{i}]| = {delta:.3e}")]
    Asymmetric { i: usize, j: usize, delta: f64 },

    #[error(
        "Jacobi eigendecomposition did not converge: off-diagonal residual {residual:.3e} \
         after {sweeps} sweeps"
    )]
    EigenNonConvergence { residual: f64, sweeps: usize },

    #[error("singular representation: {0}")]
    SingularRepresentation(&'static str),

    #[error(
        "origin not strictly interior to the ellipsoid (1 - m'Am = {margin:.3e}); \
         translate coordinates so the center is at the origin and retry"
    )]
    OriginNotInterior { margin: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown size function `{0}`")]
    UnknownSizeFunction(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("polytope has empty interior (best inscribed-ball radius {radius:.3e})")]
    EmptyInterior { radius: f64 },

    #[error("polytope is unbounded (recession direction {direction:?})")]
    Unbounded { direction: Vec<f64> },

    #[error("center not interior to the polytope: row {row} violated by {violation:.3e}")]
    CenterNotInterior { row: usize, violation: f64 },

    #[error("points span only a {rank}-dimensional affine subspace of R^{dim}")]
    DegenerateSpan { rank: usize, dim: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

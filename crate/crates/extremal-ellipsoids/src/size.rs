//! Size functions on semi-axis vectors, the componentwise power maps, and
//! spectral composition onto symmetric matrices.

use serde::{Deserialize, Serialize};

use crate::elliptic::{arc_length_with, ModulusConvention};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

/// Unit-ball volume kappa_d via the recurrence kappa_d = kappa_{d-2} * 2 pi / d.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(dim - 2) * std::f64::consts::TAU / dim as f64,
    }
}

/// Componentwise |x_i|^p. Rejects zero components when p < 0.
pub fn w_pow(p: f64, x: &[f64]) -> Result<Vec<f64>> {
    if p < 0.0 {
        if let Some(i) = x.iter().position(|v| *v == 0.0) {
            return Err(Error::Domain(format!(
                "w_pow({p}) hits a pole: component {i} is zero"
            )));
        }
    }
    Ok(x.iter().map(|v| v.abs().powf(p)).collect())
}

/// A size function: continuous on non-negative semi-axis vectors, invariant
/// under permutations, strictly monotone increasing in every argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name", content = "param")]
pub enum SizeFunction {
    /// kappa_d * product of the semi-axes (the volume of the ellipsoid).
    Volume,
    /// Sum of the semi-axes.
    Sum,
    /// Sum of square roots of the semi-axes.
    SqrtSum,
    /// l^q norm of the semi-axis vector, q >= 1.
    #[serde(rename = "pnorm")]
    PNorm(f64),
    /// max{a, b} + 16 min{a, b} on two axes. Not convex after the -1/2 power
    /// map, which is what makes it a useful stress case.
    SquareCounterexample,
    /// Perimeter of the two-axis ellipse.
    ArcLength(ModulusConvention),
}

impl SizeFunction {
    /// Parses the CLI/JSON spelling: `volume`, `sum`, `sqrt_sum`, `pnorm:Q`,
    /// `square_counterexample`, `arc_length`.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "volume" => Ok(SizeFunction::Volume),
            "sum" => Ok(SizeFunction::Sum),
            "sqrt_sum" => Ok(SizeFunction::SqrtSum),
            "square_counterexample" => Ok(SizeFunction::SquareCounterexample),
            "arc_length" => Ok(SizeFunction::ArcLength(ModulusConvention::Eccentric)),
            _ => {
                if let Some(q) = name.strip_prefix("pnorm:") {
                    let q: f64 = q
                        .parse()
                        .map_err(|_| Error::InvalidParameter(format!("pnorm exponent `{q}`")))?;
                    if !(q >= 1.0) {
                        return Err(Error::InvalidParameter(format!(
                            "pnorm exponent must be >= 1, got {q}"
                        )));
                    }
                    Ok(SizeFunction::PNorm(q))
                } else {
                    Err(Error::UnknownSizeFunction(name.to_string()))
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            SizeFunction::Volume => "volume".into(),
            SizeFunction::Sum => "sum".into(),
            SizeFunction::SqrtSum => "sqrt_sum".into(),
            SizeFunction::PNorm(q) => format!("pnorm:{q}"),
            SizeFunction::SquareCounterexample => "square_counterexample".into(),
            SizeFunction::ArcLength(_) => "arc_length".into(),
        }
    }

    /// Dimension restriction, if any.
    pub fn declared_dim(&self) -> Option<usize> {
        match self {
            SizeFunction::SquareCounterexample | SizeFunction::ArcLength(_) => Some(2),
            _ => None,
        }
    }

    pub fn strictly_monotone(&self) -> bool {
        true
    }

    pub fn symmetric(&self) -> bool {
        true
    }

    /// Evaluates on a vector of non-negative semi-axis lengths (any order).
    pub fn eval(&self, axes: &[f64]) -> Result<f64> {
        if axes.is_empty() {
            return Err(Error::Domain("empty semi-axis vector".into()));
        }
        if let Some(d) = self.declared_dim() {
            if axes.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: axes.len(),
                });
            }
        }
        if axes.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::Domain(format!(
                "semi-axes must be finite and non-negative, got {axes:?}"
            )));
        }
        Ok(match self {
            SizeFunction::Volume => {
                unit_ball_volume(axes.len()) * axes.iter().product::<f64>()
            }
            SizeFunction::Sum => axes.iter().sum(),
            SizeFunction::SqrtSum => axes.iter().map(|a| a.sqrt()).sum(),
            SizeFunction::PNorm(q) => {
                axes.iter().map(|a| a.powf(*q)).sum::<f64>().powf(1.0 / q)
            }
            SizeFunction::SquareCounterexample => {
                let (a, b) = (axes[0], axes[1]);
                a.max(b) + 16.0 * a.min(b)
            }
            SizeFunction::ArcLength(conv) => arc_length_with(axes[0], axes[1], *conv)?,
        })
    }

    /// f composed with w^p on the spectrum of S.
    pub fn eval_on_matrix(&self, p: f64, s: &SymMatrix) -> Result<f64> {
        self.eval(&w_pow(p, &s.eigenvalues()?)?)
    }

    /// The builtins shipped with the crate, each with the power exponent used
    /// when its home problem reads semi-axes off a PreImage/Quadric/dual
    /// spectrum.
    pub fn builtins() -> Vec<SizeFunction> {
        vec![
            SizeFunction::Volume,
            SizeFunction::Sum,
            SizeFunction::SqrtSum,
            SizeFunction::PNorm(2.0),
            SizeFunction::SquareCounterexample,
            SizeFunction::ArcLength(ModulusConvention::Eccentric),
        ]
    }
}

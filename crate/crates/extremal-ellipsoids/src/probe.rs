//! Midpoint convexity/concavity probe for spectral compositions.
//!
//! Tests the strict midpoint inequality for g = f o w^p on vector domains and
//! g = f o w^p o e on matrix segments. Verdict agreement between the two is
//! the numerical face of the reduction from symmetric spectral functions to
//! their diagonal restrictions.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::sample::{rng_from_seed, symmetric_with_spectrum};
use crate::size::{w_pow, SizeFunction};

/// Midpoint gap beyond which a draw counts as a violation, relative to the
/// magnitude of the three values involved.
pub const PROBE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Convex,
    Concave,
}

impl Property {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "convex" => Ok(Property::Convex),
            "concave" => Ok(Property::Concave),
            _ => Err(Error::InvalidParameter(format!(
                "property must be `convex` or `concave`, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeDomain {
    /// Componentwise log-uniform draws in [1e-2, 1e2].
    Positive,
    /// As `Positive`, but coordinates are zeroed with small probability;
    /// draws that hit a pole of w^p are resampled and counted.
    Nonnegative,
    /// Symmetric matrices with spectra drawn as in the vector domains,
    /// conjugated by Haar-random rotations; segments taken in matrix space.
    Matrices,
}

impl ProbeDomain {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "positive" => Ok(ProbeDomain::Positive),
            "nonnegative" => Ok(ProbeDomain::Nonnegative),
            "matrices" => Ok(ProbeDomain::Matrices),
            _ => Err(Error::InvalidParameter(format!(
                "domain must be `positive`, `nonnegative` or `matrices`, got `{s}`"
            ))),
        }
    }
}

/// A violating segment: endpoint data (spectra for the matrix domain), the
/// three g values and the signed midpoint gap.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub g_x: f64,
    pub g_y: f64,
    pub g_mid: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub function: String,
    pub p: f64,
    pub property: Property,
    pub domain: ProbeDomain,
    pub dim: usize,
    pub trials: u64,
    pub violations: u64,
    /// Largest signed gap seen: positive means the inequality failed by that
    /// much, negative means the worst draw still had slack.
    pub worst_gap: f64,
    /// Draws rejected for pole contact or coincident spectra.
    pub resampled: u64,
    pub witness: Option<ProbeWitness>,
}

impl ProbeReport {
    pub fn verdict_holds(&self) -> bool {
        self.violations == 0
    }
}

fn draw_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize, allow_zero: bool) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            if allow_zero && rng.random::<f64>() < 0.05 {
                0.0
            } else {
                10f64.powf(rng.random_range(-2.0..2.0))
            }
        })
        .collect()
}

fn nearly_equal_sorted(x: &[f64], y: &[f64]) -> bool {
    let mut a = x.to_vec();
    let mut b = y.to_vec();
    a.sort_by(|u, v| u.partial_cmp(v).unwrap());
    b.sort_by(|u, v| u.partial_cmp(v).unwrap());
    a.iter()
        .zip(&b)
        .all(|(u, v)| (u - v).abs() <= 1e-9 * (1.0 + u.abs()))
}

/// Runs `trials` midpoint tests of the requested property for g = f o w^p
/// (vector domains) or g = f o w^p o e (matrix domain) in dimension `dim`.
pub fn convexity_probe(
    f: &SizeFunction,
    p: f64,
    property: Property,
    domain: ProbeDomain,
    dim: usize,
    trials: u64,
    seed: u64,
) -> Result<ProbeReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if let Some(d) = f.declared_dim() {
        if dim != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: dim,
            });
        }
    }
    let mut rng = rng_from_seed(seed);
    let allow_zero = domain == ProbeDomain::Nonnegative;

    let mut report = ProbeReport {
        function: f.name(),
        p,
        property,
        domain,
        dim,
        trials,
        violations: 0,
        worst_gap: f64::NEG_INFINITY,
        resampled: 0,
        witness: None,
    };

    let mut done = 0;
    while done < trials {
        let x = draw_vector(&mut rng, dim, allow_zero);
        let y = draw_vector(&mut rng, dim, allow_zero);
        if nearly_equal_sorted(&x, &y) {
            report.resampled += 1;
            continue;
        }
        let evaluated = match domain {
            ProbeDomain::Positive | ProbeDomain::Nonnegative => {
                let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
                eval_triple(f, p, &x, &y, &mid)
            }
            ProbeDomain::Matrices => {
                let sx = symmetric_with_spectrum(&mut rng, &x);
                let sy = symmetric_with_spectrum(&mut rng, &y);
                let smid = SymMatrix::lin_comb(0.5, &sx, 0.5, &sy);
                eval_matrix_triple(f, p, &sx, &sy, &smid)
            }
        };
        let (g_x, g_y, g_mid) = match evaluated {
            Ok(t) => t,
            Err(Error::Domain(_)) => {
                report.resampled += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        done += 1;

        let chord = 0.5 * (g_x + g_y);
        let scale = 1.0_f64.max(g_x.abs()).max(g_y.abs()).max(g_mid.abs());
        // positive gap = inequality violated
        let gap = match property {
            Property::Convex => (g_mid - chord) / scale,
            Property::Concave => (chord - g_mid) / scale,
        };
        if gap > report.worst_gap {
            report.worst_gap = gap;
        }
        if gap > PROBE_TOL {
            report.violations += 1;
            if report
                .witness
                .as_ref()
                .map(|w| gap > w.gap)
                .unwrap_or(true)
            {
                report.witness = Some(ProbeWitness {
                    x,
                    y,
                    g_x,
                    g_y,
                    g_mid,
                    gap,
                });
            }
        }
    }
    Ok(report)
}

fn eval_triple(
    f: &SizeFunction,
    p: f64,
    x: &[f64],
    y: &[f64],
    mid: &[f64],
) -> Result<(f64, f64, f64)> {
    Ok((
        f.eval(&w_pow(p, x)?)?,
        f.eval(&w_pow(p, y)?)?,
        f.eval(&w_pow(p, mid)?)?,
    ))
}

fn eval_matrix_triple(
    f: &SizeFunction,
    p: f64,
    x: &SymMatrix,
    y: &SymMatrix,
    mid: &SymMatrix,
) -> Result<(f64, f64, f64)> {
    Ok((
        f.eval_on_matrix(p, x)?,
        f.eval_on_matrix(p, y)?,
        f.eval_on_matrix(p, mid)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(
        f: &SizeFunction,
        p: f64,
        property: Property,
        domain: ProbeDomain,
        trials: u64,
    ) -> ProbeReport {
        convexity_probe(f, p, property, domain, f.declared_dim().unwrap_or(3), trials, 424242)
            .unwrap()
    }

    #[test]
    fn volume_reciprocal_spectrum_is_convex() {
        // f o w^{-1} on a PreImage spectrum is kappa_d / prod(x), a convex
        // function on the positive orthant.
        let r = run(
            &SizeFunction::Volume,
            -1.0,
            Property::Convex,
            ProbeDomain::Positive,
            10_000,
        );
        assert_eq!(r.violations, 0, "worst gap {}", r.worst_gap);
    }

    #[test]
    fn sqrt_sum_is_concave_on_nonnegatives() {
        let r = run(
            &SizeFunction::SqrtSum,
            1.0,
            Property::Concave,
            ProbeDomain::Nonnegative,
            10_000,
        );
        assert_eq!(r.violations, 0, "worst gap {}", r.worst_gap);
    }

    #[test]
    fn pole_draws_are_resampled_and_counted() {
        // p < 0 on the nonnegative domain hits zero coordinates now and then
        let r = run(
            &SizeFunction::Volume,
            -1.0,
            Property::Convex,
            ProbeDomain::Nonnegative,
            2_000,
        );
        assert_eq!(r.violations, 0);
        assert!(r.resampled > 0, "no pole draw in 2000 trials is implausible");
    }

    #[test]
    fn square_counterexample_fails_convexity_with_witness() {
        let r = run(
            &SizeFunction::SquareCounterexample,
            -0.5,
            Property::Convex,
            ProbeDomain::Positive,
            10_000,
        );
        assert!(r.violations > 0);
        let w = r.witness.expect("violations imply a witness");
        assert!(w.gap > PROBE_TOL);
        // replay the witness
        let (gx, gy, gmid) = eval_triple(
            &SizeFunction::SquareCounterexample,
            -0.5,
            &w.x,
            &w.y,
            &w.x.iter().zip(&w.y).map(|(a, b)| 0.5 * (a + b)).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(gmid > 0.5 * (gx + gy));
    }

    #[test]
    fn matrix_domain_matches_vector_domain_verdicts() {
        for (f, p, property) in [
            (SizeFunction::Volume, -1.0, Property::Convex),
            (SizeFunction::Volume, -0.5, Property::Convex),
            (SizeFunction::SqrtSum, 1.0, Property::Concave),
            (SizeFunction::SquareCounterexample, -0.5, Property::Convex),
        ] {
            let dim = f.declared_dim().unwrap_or(3);
            let vector = convexity_probe(&f, p, property, ProbeDomain::Positive, dim, 2000, 7)
                .unwrap();
            let matrix = convexity_probe(&f, p, property, ProbeDomain::Matrices, dim, 2000, 7)
                .unwrap();
            assert_eq!(
                vector.verdict_holds(),
                matrix.verdict_holds(),
                "{} p={p} disagrees across domains",
                f.name()
            );
        }
    }

    #[test]
    fn dimension_restriction_and_trial_count_are_checked() {
        assert!(convexity_probe(
            &SizeFunction::SquareCounterexample,
            -0.5,
            Property::Convex,
            ProbeDomain::Positive,
            3,
            10,
            1
        )
        .is_err());
        assert!(convexity_probe(
            &SizeFunction::Volume,
            1.0,
            Property::Convex,
            ProbeDomain::Positive,
            2,
            0,
            1
        )
        .is_err());
    }

    #[test]
    fn probe_is_deterministic_in_the_seed() {
        let f = SizeFunction::SquareCounterexample;
        let a = convexity_probe(&f, -0.5, Property::Convex, ProbeDomain::Matrices, 2, 500, 5)
            .unwrap();
        let b = convexity_probe(&f, -0.5, Property::Convex, ProbeDomain::Matrices, 2, 500, 5)
            .unwrap();
        assert_eq!(a.violations, b.violations);
        assert_eq!(a.worst_gap, b.worst_gap);
    }
}

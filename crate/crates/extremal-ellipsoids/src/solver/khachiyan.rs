//! Barycentric coordinate-ascent solver for the minimum-volume enclosing
//! ellipsoid, used as an independent oracle for the general solver.
//!
//! Points are lifted to (x, 1); the weight vector u over points is updated
//! one coordinate at a time. Besides the classical add-step toward the point
//! of largest leverage, an away-step shrinks the weight of the point with the
//! smallest leverage among the support, which removes the slow tail on
//! clustered inputs. Termination: all leverages within (d+1)(1 ± eps).

use nalgebra::{DMatrix, DVector};

use crate::ellipsoid::{AffineMap, QuadricEllipsoid, MAX_DIM};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::size::unit_ball_volume;

use super::SolveResult;

const MAX_ITERATIONS: u64 = 500_000;

/// Rank of the affine span of a point set (eigenvalue count of the centered
/// scatter matrix above a relative threshold).
pub(crate) fn affine_rank(points: &[DVector<f64>]) -> Result<usize> {
    let dim = points[0].len();
    let n = points.len() as f64;
    let mut mean = DVector::zeros(dim);
    for x in points {
        mean += x;
    }
    mean /= n;
    let mut scatter = SymMatrix::zeros(dim);
    for x in points {
        let d = x - &mean;
        scatter = SymMatrix::lin_comb(1.0, &scatter, 1.0 / n, &SymMatrix::from_rank_one(&d));
    }
    let eig = scatter.sym_eigen()?;
    let top = eig.max().max(0.0);
    let tol = 1e-12 * top.max(1.0);
    Ok(eig.values.iter().filter(|l| **l > tol).count())
}

fn validate(points: &[DVector<f64>], eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "approximation tolerance must be positive, got {eps}"
        )));
    }
    if points.is_empty() {
        return Err(Error::InvalidParameter("empty point set".into()));
    }
    let dim = points[0].len();
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::DimensionOutOfRange(dim));
    }
    for x in points {
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: x.len(),
            });
        }
    }
    let rank = if points.len() <= dim {
        affine_rank(points)?.min(points.len() - 1)
    } else {
        affine_rank(points)?
    };
    if points.len() < dim + 1 || rank < dim {
        return Err(Error::DegenerateSpan { rank, dim });
    }
    Ok(dim)
}

/// (1+eps)-approximate minimum-volume enclosing ellipsoid of a point set.
/// The returned ellipsoid is rescaled so every input point is contained
/// exactly (worst point on the boundary).
pub fn khachiyan_mvee(points: &[DVector<f64>], eps: f64) -> Result<SolveResult> {
    let dim = validate(points, eps)?;
    let n = points.len();
    let dd = (dim + 1) as f64;

    // lifted points
    let lifted: Vec<DVector<f64>> = points
        .iter()
        .map(|x| {
            let mut q = DVector::zeros(dim + 1);
            q.rows_mut(0, dim).copy_from(x);
            q[dim] = 1.0;
            q
        })
        .collect();

    let mut u = vec![1.0 / n as f64; n];
    let mut kappa = vec![0.0; n];
    let mut iterations: u64 = 0;
    let mut converged = false;

    while iterations < MAX_ITERATIONS {
        // M(u) = sum u_i q_i q_i^T and its inverse
        let mut m: DMatrix<f64> = DMatrix::zeros(dim + 1, dim + 1);
        for (ui, q) in u.iter().zip(&lifted) {
            if *ui > 0.0 {
                for i in 0..=dim {
                    let w = *ui * q[i];
                    for j in 0..=i {
                        m[(i, j)] += w * q[j];
                    }
                }
            }
        }
        for i in 0..=dim {
            for j in (i + 1)..=dim {
                m[(i, j)] = m[(j, i)];
            }
        }
        let m_inv = match m.clone().try_inverse() {
            Some(inv) => inv,
            None => {
                // ridge fallback; only reachable through extreme cancellation
                let scale = m.amax().max(1.0);
                (m + DMatrix::identity(dim + 1, dim + 1) * (1e-14 * scale))
                    .try_inverse()
                    .ok_or(Error::SingularRepresentation(
                        "weight moment matrix is singular",
                    ))?
            }
        };

        let mut k_max = f64::NEG_INFINITY;
        let mut i_max = 0;
        let mut k_min = f64::INFINITY;
        let mut i_min = usize::MAX;
        for (i, q) in lifted.iter().enumerate() {
            let k = (&m_inv * q).dot(q);
            kappa[i] = k;
            if k > k_max {
                k_max = k;
                i_max = i;
            }
            if u[i] > 1e-15 && k < k_min {
                k_min = k;
                i_min = i;
            }
        }

        if k_max <= dd * (1.0 + eps) && k_min >= dd * (1.0 - eps) {
            converged = true;
            break;
        }
        iterations += 1;

        let gain_add = k_max / dd - 1.0;
        let gain_away = 1.0 - k_min / dd;
        if gain_add >= gain_away {
            let beta = (k_max - dd) / (dd * (k_max - 1.0));
            for w in u.iter_mut() {
                *w *= 1.0 - beta;
            }
            u[i_max] += beta;
        } else {
            let beta_min = -u[i_min] / (1.0 - u[i_min]);
            let beta = if k_min <= 1.0 + 1e-12 {
                beta_min
            } else {
                ((k_min - dd) / (dd * (k_min - 1.0))).max(beta_min)
            };
            for w in u.iter_mut() {
                *w *= 1.0 - beta;
            }
            u[i_min] = (u[i_min] + beta).max(0.0);
        }

        if iterations % 1024 == 0 {
            let s: f64 = u.iter().sum();
            for w in u.iter_mut() {
                *w /= s;
            }
        }
    }

    // center and shape from the final weights
    let mut center = DVector::zeros(dim);
    for (ui, x) in u.iter().zip(points) {
        center += x * *ui;
    }
    let mut scatter = SymMatrix::zeros(dim);
    for (ui, x) in u.iter().zip(points) {
        if *ui > 0.0 {
            scatter = SymMatrix::lin_comb(1.0, &scatter, *ui, &SymMatrix::from_rank_one(x));
        }
    }
    scatter = SymMatrix::lin_comb(1.0, &scatter, -1.0, &SymMatrix::from_rank_one(&center));
    let mut shape = scatter.sym_eigen()?.spectral_map(|l| {
        if l > 0.0 {
            1.0 / (dim as f64 * l)
        } else {
            // full affine rank was checked; treat rounding fuzz as huge curvature
            1e18
        }
    });

    // rescale so the farthest point sits exactly on the boundary
    let worst = points
        .iter()
        .map(|x| shape.quad_form(&(x - &center)))
        .fold(0.0_f64, f64::max);
    if worst > 1.0 {
        shape = shape.scale(1.0 / worst);
    }

    let eig = shape.sym_eigen()?;
    let axes: Vec<f64> = eig.values.iter().map(|l| 1.0 / l.sqrt()).collect();
    let objective = unit_ball_volume(dim) * axes.iter().product::<f64>();
    let p = eig.spectral_map(|l| l.sqrt());
    let t: Vec<f64> = {
        let pt = p.mul_vec(&center);
        (0..dim).map(|i| -pt[i]).collect()
    };
    let affine = AffineMap::preimage(p, t)?;
    let feasibility = points
        .iter()
        .map(|x| affine.membership_slack(x))
        .fold(f64::INFINITY, f64::min);
    let quadric = QuadricEllipsoid::new(center.iter().copied().collect(), shape)?;

    Ok(SolveResult {
        ellipsoid: affine,
        quadric,
        objective,
        feasibility,
        iterations,
        converged,
        rounds: Vec::new(),
        starts: Vec::new(),
        warnings: Vec::new(),
    })
}

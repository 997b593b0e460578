//! In-between ellipsoids: convex interpolation of representation parameters
//! at weight lambda, one construction per representation, plus executable
//! containment checks.
//!
//! Image interpolation stays inside the convex hull of the endpoints.
//! PreImage interpolation encloses the intersection of the endpoints.
//! Homogeneous and dual interpolations can leave the ellipsoid class
//! mid-interval; callers get a flag instead of an error.

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::ellipsoid::{
    ellipsoid_in_convex_hull, AffineMap, DualEllipsoid, HomogeneousKind, HomogeneousQuadric,
    MapMode,
};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::sample::rng_from_seed;

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "interpolation weight must lie in [0, 1], got {lambda}"
        )))
    }
}

fn check_mode(e: &AffineMap, mode: MapMode) -> Result<()> {
    if e.mode() == mode {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "expected {mode:?}-mode endpoints, got {:?}",
            e.mode()
        )))
    }
}

/// P_lambda = (1-lambda) P0 + lambda P1, t likewise, in Image mode.
/// Endpoints are reproduced exactly at lambda = 0 and 1.
pub fn between_image(e0: &AffineMap, e1: &AffineMap, lambda: f64) -> Result<AffineMap> {
    check_lambda(lambda)?;
    check_mode(e0, MapMode::Image)?;
    check_mode(e1, MapMode::Image)?;
    if lambda == 0.0 {
        return Ok(e0.clone());
    }
    if lambda == 1.0 {
        return Ok(e1.clone());
    }
    let p = SymMatrix::lin_comb(1.0 - lambda, e0.matrix(), lambda, e1.matrix());
    let t = e0.offset() * (1.0 - lambda) + e1.offset() * lambda;
    AffineMap::image(p, t.iter().copied().collect())
}

/// As `between_image` but on PreImage parameters; endpoints must be PD and
/// the interpolant stays PD.
pub fn between_preimage(e0: &AffineMap, e1: &AffineMap, lambda: f64) -> Result<AffineMap> {
    check_lambda(lambda)?;
    check_mode(e0, MapMode::PreImage)?;
    check_mode(e1, MapMode::PreImage)?;
    if lambda == 0.0 {
        return Ok(e0.clone());
    }
    if lambda == 1.0 {
        return Ok(e1.clone());
    }
    let p = SymMatrix::lin_comb(1.0 - lambda, e0.matrix(), lambda, e1.matrix());
    let t = e0.offset() * (1.0 - lambda) + e1.offset() * lambda;
    AffineMap::preimage(p, t.iter().copied().collect())
}

/// M_lambda = (1-lambda) M0 + lambda M1 on point-form homogeneous matrices.
/// The boolean reports whether the combination still describes a bounded
/// nonempty ellipsoid.
pub fn between_homogeneous(
    e0: &HomogeneousQuadric,
    e1: &HomogeneousQuadric,
    lambda: f64,
) -> Result<(HomogeneousQuadric, bool)> {
    between_homogeneous_kind(e0, e1, lambda, HomogeneousKind::Point)
}

/// N_lambda on dual-form homogeneous matrices; the flag is computed from the
/// recovered inverse shape matrix.
pub fn between_homogeneous_dual(
    n0: &HomogeneousQuadric,
    n1: &HomogeneousQuadric,
    lambda: f64,
) -> Result<(HomogeneousQuadric, bool)> {
    between_homogeneous_kind(n0, n1, lambda, HomogeneousKind::Dual)
}

fn between_homogeneous_kind(
    e0: &HomogeneousQuadric,
    e1: &HomogeneousQuadric,
    lambda: f64,
    kind: HomogeneousKind,
) -> Result<(HomogeneousQuadric, bool)> {
    check_lambda(lambda)?;
    for e in [e0, e1] {
        if e.kind() != kind {
            return Err(Error::InvalidParameter(format!(
                "expected {kind:?}-kind homogeneous endpoints, got {:?}",
                e.kind()
            )));
        }
    }
    if e0.dim() != e1.dim() {
        return Err(Error::DimensionMismatch {
            expected: e0.dim(),
            actual: e1.dim(),
        });
    }
    let h = if lambda == 0.0 {
        e0.clone()
    } else if lambda == 1.0 {
        e1.clone()
    } else {
        let m = SymMatrix::lin_comb(1.0 - lambda, e0.matrix(), lambda, e1.matrix());
        HomogeneousQuadric::new(kind, m)?
    };
    let flag = h.is_ellipsoid();
    Ok((h, flag))
}

/// Convex combination of two valid duals through their homogeneous matrices.
pub fn between_dual(
    e0: &DualEllipsoid,
    e1: &DualEllipsoid,
    lambda: f64,
) -> Result<(HomogeneousQuadric, bool)> {
    between_homogeneous_dual(&e0.to_homogeneous(), &e1.to_homogeneous(), lambda)
}

/// One-parameter family over a pair of endpoints in a chosen representation.
#[derive(Debug, Clone)]
pub enum InBetweenFamily {
    Image(AffineMap, AffineMap),
    PreImage(AffineMap, AffineMap),
    Homogeneous(HomogeneousQuadric, HomogeneousQuadric),
    Dual(HomogeneousQuadric, HomogeneousQuadric),
}

/// Family member at a given weight; homogeneous kinds carry the
/// still-an-ellipsoid flag.
#[derive(Debug, Clone)]
pub enum FamilyMember {
    Map(AffineMap),
    Quadric(HomogeneousQuadric, bool),
}

impl InBetweenFamily {
    pub fn at(&self, lambda: f64) -> Result<FamilyMember> {
        Ok(match self {
            InBetweenFamily::Image(e0, e1) => {
                FamilyMember::Map(between_image(e0, e1, lambda)?)
            }
            InBetweenFamily::PreImage(e0, e1) => {
                FamilyMember::Map(between_preimage(e0, e1, lambda)?)
            }
            InBetweenFamily::Homogeneous(e0, e1) => {
                let (h, flag) = between_homogeneous(e0, e1, lambda)?;
                FamilyMember::Quadric(h, flag)
            }
            InBetweenFamily::Dual(n0, n1) => {
                let (h, flag) = between_homogeneous_dual(n0, n1, lambda)?;
                FamilyMember::Quadric(h, flag)
            }
        })
    }
}

/// Default interpolation grid: multiples of 0.1 plus 0.01 and 0.99 to probe
/// the near-endpoint regime.
pub fn default_lambda_grid() -> Vec<f64> {
    let mut grid = vec![0.0, 0.01];
    for i in 1..=9 {
        grid.push(i as f64 / 10.0);
    }
    grid.push(0.99);
    grid.push(1.0);
    grid
}

#[derive(Debug, Clone, Serialize)]
pub struct HullCheckEntry {
    pub lambda: f64,
    pub margin: f64,
    pub ok: bool,
}

/// Result of probing E_lambda inside conv(E0 union E1) over a grid.
#[derive(Debug, Clone, Serialize)]
pub struct HullContainmentReport {
    pub entries: Vec<HullCheckEntry>,
    pub worst_margin: f64,
    pub violations: u64,
}

/// Support-dominance check of the image interpolation against the convex
/// hull of its endpoints, per grid weight.
pub fn check_hull_containment(
    e0: &AffineMap,
    e1: &AffineMap,
    lambdas: &[f64],
    n_dirs: usize,
) -> Result<HullContainmentReport> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("empty interpolation grid".into()));
    }
    let mut entries = Vec::with_capacity(lambdas.len());
    let mut worst = f64::INFINITY;
    let mut violations = 0;
    for &lambda in lambdas {
        let e = between_image(e0, e1, lambda)?;
        let (ok, margin) = ellipsoid_in_convex_hull(&e, e0, e1, n_dirs)?;
        worst = worst.min(margin);
        if !ok {
            violations += 1;
        }
        entries.push(HullCheckEntry { lambda, margin, ok });
    }
    Ok(HullContainmentReport {
        entries,
        worst_margin: worst,
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct IntersectionCheckEntry {
    pub lambda: f64,
    pub worst_slack: f64,
    pub ok: bool,
}

/// Result of sampling E0 intersect E1 and testing membership in E_lambda.
#[derive(Debug, Clone, Serialize)]
pub struct IntersectionEnclosureReport {
    pub accepted: usize,
    pub proposals: usize,
    /// Fewer than 10 intersection points found; nothing to check.
    pub vacuous: bool,
    pub entries: Vec<IntersectionCheckEntry>,
    pub violations: u64,
}

/// Rejection-samples the intersection of two preimage-form ellipsoids from
/// the smaller endpoint's bounding box (up to `n_samples` accepted points or
/// 10^6 proposals) and verifies every sample lies in each E_lambda with
/// slack >= -1e-12.
pub fn check_intersection_enclosure(
    e0: &AffineMap,
    e1: &AffineMap,
    lambdas: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<IntersectionEnclosureReport> {
    check_mode(e0, MapMode::PreImage)?;
    check_mode(e1, MapMode::PreImage)?;
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("empty interpolation grid".into()));
    }
    let smaller = if e0.volume()? <= e1.volume()? { e0 } else { e1 };
    let (lo, hi) = smaller.to_quadric()?.to_affine().bounding_box()?;
    let dim = e0.dim();

    let mut rng = rng_from_seed(seed);
    let mut accepted = Vec::with_capacity(n_samples);
    let mut proposals = 0usize;
    while accepted.len() < n_samples && proposals < 1_000_000 {
        proposals += 1;
        let x = DVector::from_fn(dim, |i, _| rng.random_range(lo[i]..=hi[i]));
        if e0.contains(&x) && e1.contains(&x) {
            accepted.push(x);
        }
    }

    if accepted.len() < 10 {
        return Ok(IntersectionEnclosureReport {
            accepted: accepted.len(),
            proposals,
            vacuous: true,
            entries: Vec::new(),
            violations: 0,
        });
    }

    let mut entries = Vec::with_capacity(lambdas.len());
    let mut violations = 0;
    for &lambda in lambdas {
        let e = between_preimage(e0, e1, lambda)?;
        let worst = accepted
            .iter()
            .map(|x| e.membership_slack(x))
            .fold(f64::INFINITY, f64::min);
        let ok = worst >= -1e-12;
        if !ok {
            violations += 1;
        }
        entries.push(IntersectionCheckEntry {
            lambda,
            worst_slack: worst,
            ok,
        });
    }
    Ok(IntersectionEnclosureReport {
        accepted: accepted.len(),
        proposals,
        vacuous: false,
        entries,
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DualHullEntry {
    pub lambda: f64,
    pub is_ellipsoid: bool,
    /// Present when the combination is an ellipsoid and was checked.
    pub margin: Option<f64>,
}

/// Result of the near-endpoint dual interpolation check.
#[derive(Debug, Clone, Serialize)]
pub struct DualHullReport {
    /// Largest grid prefix from lambda = 0 where the combination stays an
    /// ellipsoid.
    pub lambda_star_low: f64,
    /// Smallest grid suffix bound from lambda = 1, same criterion.
    pub lambda_star_high: f64,
    pub entries: Vec<DualHullEntry>,
    pub worst_margin: Option<f64>,
    pub violations: u64,
}

/// Probes the dual interpolation on the valid prefix from each endpoint:
/// containment (support dominance against the endpoint hull) is only
/// evaluated where the combination still describes an ellipsoid. Degenerate
/// weights are recorded, never errors. 2D only.
pub fn check_dual_hull_containment(
    n0: &HomogeneousQuadric,
    n1: &HomogeneousQuadric,
    lambdas: &[f64],
    n_dirs: usize,
) -> Result<DualHullReport> {
    if n0.dim() != 2 || n1.dim() != 2 {
        return Err(Error::InvalidParameter(
            "dual interpolation check is restricted to two dimensions".into(),
        ));
    }
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("empty interpolation grid".into()));
    }
    let mut grid = lambdas.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let flags: Vec<(f64, HomogeneousQuadric, bool)> = grid
        .iter()
        .map(|&l| {
            let (h, flag) = between_homogeneous_dual(n0, n1, l)?;
            Ok((l, h, flag))
        })
        .collect::<Result<_>>()?;

    let mut lambda_star_low = 0.0;
    for (l, _, flag) in &flags {
        if !*flag {
            break;
        }
        lambda_star_low = *l;
    }
    let mut lambda_star_high = 1.0;
    for (l, _, flag) in flags.iter().rev() {
        if !*flag {
            break;
        }
        lambda_star_high = *l;
    }

    let hull0 = n0.to_quadric()?.to_affine();
    let hull1 = n1.to_quadric()?.to_affine();

    let mut entries = Vec::with_capacity(flags.len());
    let mut worst: Option<f64> = None;
    let mut violations = 0;
    for (lambda, h, is_ellipsoid) in flags {
        let in_prefix = lambda <= lambda_star_low || lambda >= lambda_star_high;
        let margin = if is_ellipsoid && in_prefix {
            let e = h.to_quadric()?.to_affine();
            let (ok, margin) = ellipsoid_in_convex_hull(&e, &hull0, &hull1, n_dirs)?;
            if !ok {
                violations += 1;
            }
            worst = Some(worst.map_or(margin, |w: f64| w.min(margin)));
            Some(margin)
        } else {
            None
        };
        entries.push(DualHullEntry {
            lambda,
            is_ellipsoid,
            margin,
        });
    }
    Ok(DualHullReport {
        lambda_star_low,
        lambda_star_high,
        entries,
        worst_margin: worst,
        violations,
    })
}

/// Convenience wrapper over normalized dual endpoints.
pub fn check_dual_pair(
    e0: &DualEllipsoid,
    e1: &DualEllipsoid,
    lambdas: &[f64],
    n_dirs: usize,
) -> Result<DualHullReport> {
    check_dual_hull_containment(&e0.to_homogeneous(), &e1.to_homogeneous(), lambdas, n_dirs)
}

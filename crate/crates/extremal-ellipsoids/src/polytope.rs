//! H-polytopes: intersections of half-spaces a_j . x <= b_j with unit normals.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::ellipsoid::{check_dim, vec_to_dvector, AffineMap, MapMode};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct HalfspaceRaw {
    a: Vec<f64>,
    b: f64,
}

#[derive(Serialize, Deserialize)]
struct PolytopeRaw {
    rows: Vec<HalfspaceRaw>,
}

/// Half-space list; rows are normalized to unit normals at construction so
/// slack magnitudes are comparable across rows. Boundedness and interior are
/// not checked here: solvers preflight them and report certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeRaw", into = "PolytopeRaw")]
pub struct HPolytope {
    dim: usize,
    normals: Vec<DVector<f64>>,
    offsets: Vec<f64>,
}

impl TryFrom<PolytopeRaw> for HPolytope {
    type Error = Error;
    fn try_from(raw: PolytopeRaw) -> Result<Self> {
        HPolytope::new(raw.rows.into_iter().map(|r| (r.a, r.b)).collect())
    }
}

impl From<HPolytope> for PolytopeRaw {
    fn from(p: HPolytope) -> Self {
        PolytopeRaw {
            rows: p
                .normals
                .iter()
                .zip(&p.offsets)
                .map(|(a, &b)| HalfspaceRaw {
                    a: a.iter().copied().collect(),
                    b,
                })
                .collect(),
        }
    }
}

impl HPolytope {
    pub fn new(rows: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("polytope needs at least one row".into()));
        }
        let dim = rows[0].0.len();
        check_dim(dim)?;
        let mut normals = Vec::with_capacity(rows.len());
        let mut offsets = Vec::with_capacity(rows.len());
        for (i, (a, b)) in rows.into_iter().enumerate() {
            if a.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: a.len(),
                });
            }
            let a = vec_to_dvector(&a);
            let norm = a.norm();
            if norm <= 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "row {i} has a zero normal vector"
                )));
            }
            normals.push(&a / norm);
            offsets.push(b / norm);
        }
        Ok(HPolytope {
            dim,
            normals,
            offsets,
        })
    }

    /// Axis-aligned box [-half, half]^dim.
    pub fn axis_box(dim: usize, half: f64) -> Self {
        let mut rows = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                let mut a = vec![0.0; dim];
                a[i] = sign;
                rows.push((a, half));
            }
        }
        HPolytope::new(rows).unwrap()
    }

    /// Equilateral triangle with vertices (0,0), (1,0), (1/2, sqrt(3)/2).
    pub fn equilateral_triangle() -> Self {
        let s = 3.0_f64.sqrt();
        HPolytope::new(vec![
            (vec![0.0, -1.0], 0.0),
            (vec![-s / 2.0, 0.5], 0.0),
            (vec![s / 2.0, 0.5], s / 2.0),
        ])
        .unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rows(&self) -> impl Iterator<Item = (&DVector<f64>, f64)> {
        self.normals.iter().zip(self.offsets.iter().copied())
    }

    pub fn normal(&self, j: usize) -> &DVector<f64> {
        &self.normals[j]
    }

    pub fn offset(&self, j: usize) -> f64 {
        self.offsets[j]
    }

    /// min_j (b_j - a_j . x): positive strictly inside, negative outside.
    pub fn interior_slack(&self, x: &DVector<f64>) -> f64 {
        self.rows()
            .map(|(a, b)| b - a.dot(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.interior_slack(x) >= -1e-12
    }

    /// Per-row inscribed-ellipsoid slacks b_j - (|P a_j| + a_j . t) for an
    /// image-form ellipsoid; non-negative means the ellipsoid respects row j.
    pub fn ellipsoid_slacks(&self, e: &AffineMap) -> Result<Vec<f64>> {
        if e.mode() != MapMode::Image {
            return Err(Error::InvalidParameter(
                "inscribed-constraint slacks need an image-form ellipsoid".into(),
            ));
        }
        if e.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: e.dim(),
            });
        }
        Ok(self
            .rows()
            .map(|(a, b)| b - a.dot(e.offset()) - e.matrix().mul_vec(a).norm())
            .collect())
    }
}

/// Containment of an image-form ellipsoid in a polytope: true iff every row
/// slack is >= -1e-9, plus the worst slack for diagnostics.
pub fn ellipsoid_in_polytope(e: &AffineMap, f: &HPolytope) -> Result<(bool, f64)> {
    let worst = f
        .ellipsoid_slacks(e)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok((worst >= -1e-9, worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SymMatrix;

    #[test]
    fn unit_ball_fits_the_unit_box_tightly() {
        let square = HPolytope::axis_box(2, 1.0);
        let ball = AffineMap::unit_ball(2);
        let (ok, worst) = ellipsoid_in_polytope(&ball, &square).unwrap();
        assert!(ok);
        assert!(worst.abs() <= 1e-12);

        let bigger = AffineMap::image(SymMatrix::from_diag(&[1.1, 1.1]), vec![0.0, 0.0]).unwrap();
        let (ok, worst) = ellipsoid_in_polytope(&bigger, &square).unwrap();
        assert!(!ok);
        assert!((worst + 0.1).abs() <= 1e-12);
    }

    #[test]
    fn incircle_is_tangent_to_all_triangle_sides() {
        let tri = HPolytope::equilateral_triangle();
        let r = 3.0_f64.sqrt() / 6.0;
        let incircle = AffineMap::image(
            SymMatrix::from_diag(&[r, r]),
            vec![0.5, r],
        )
        .unwrap();
        let slacks = tri.ellipsoid_slacks(&incircle).unwrap();
        assert_eq!(slacks.len(), 3);
        for s in slacks {
            assert!(s.abs() <= 1e-12, "tangency slack {s}");
        }
    }

    #[test]
    fn rows_are_normalized_and_zero_rows_rejected() {
        let p = HPolytope::new(vec![(vec![2.0, 0.0], 4.0)]).unwrap();
        assert!((p.normal(0) - DVector::from_vec(vec![1.0, 0.0])).norm() <= 1e-15);
        assert_eq!(p.offset(0), 2.0);
        assert!(HPolytope::new(vec![(vec![0.0, 0.0], 1.0)]).is_err());
        assert!(HPolytope::new(vec![]).is_err());
        assert!(HPolytope::new(vec![(vec![1.0], 1.0), (vec![1.0, 0.0], 1.0)]).is_err());
    }

    #[test]
    fn point_membership() {
        let tri = HPolytope::equilateral_triangle();
        assert!(tri.contains(&DVector::from_vec(vec![0.5, 0.2])));
        assert!(!tri.contains(&DVector::from_vec(vec![0.5, 0.9])));
        assert!(!tri.contains(&DVector::from_vec(vec![-0.1, 0.1])));
        // vertices are boundary points
        assert!(tri.contains(&DVector::from_vec(vec![0.0, 0.0])));
        assert!(tri.interior_slack(&DVector::from_vec(vec![0.5, 0.28867513459481287])) > 0.28);
    }

    #[test]
    fn serde_round_trip_with_rows_field() {
        let p = HPolytope::axis_box(2, 1.5);
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains("\"rows\""));
        assert!(json.contains("\"a\""));
        assert!(json.contains("\"b\""));
        let back: HPolytope = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }
}

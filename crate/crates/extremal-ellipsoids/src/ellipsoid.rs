//! Ellipsoid representations and the conversions between them.
//!
//! Four interchangeable descriptions of the same geometric object:
//!   - `QuadricEllipsoid`: (x - m)' A (x - m) <= 1, A symmetric PSD.
//!   - `AffineMap` Image: { P y + t : |y| <= 1 }; PreImage: { x : |P x + t| <= 1 }.
//!   - `HomogeneousQuadric`: one (d+1)x(d+1) symmetric matrix acting on
//!     homogeneous coordinates X = (1, x), point or hyperplane (dual) kind.
//!   - `DualEllipsoid`: the hyperplanes u.x = 1 missing the ellipsoid form the
//!     region (u - c)' B (u - c) <= 1 in normal coordinates; its boundary are
//!     the tangent hyperplanes.
//!
//! Semi-axis lengths come from eigenvalue powers of the defining matrix:
//! exponent 1 for Image maps, -1 for PreImage maps, -1/2 for quadric shape
//! matrices and 1/2 for the centered dual block Q.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{SymEigen, SymMatrix};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 16;

/// Relative eigenvalue floor: spectrum entries at or below this fraction of
/// the largest eigenvalue count as zero (singular direction).
pub const PSD_REL_TOL: f64 = 1e-10;

/// Membership slack tolerance for containment predicates.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::DimensionOutOfRange(dim))
    }
}

fn check_same_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// Eigendecomposition with a PSD verdict: negative eigenvalues beyond the
/// relative floor are rejected, anything smaller counts as zero.
fn psd_eigen(s: &SymMatrix, what: &'static str) -> Result<SymEigen> {
    let e = s.sym_eigen()?;
    let scale = e.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if e.values[0] < -PSD_REL_TOL * scale.max(1e-300) {
        return Err(Error::SingularRepresentation(what));
    }
    Ok(e)
}

fn is_pd(e: &SymEigen) -> bool {
    let scale = e.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    e.values[0] > PSD_REL_TOL * scale && scale > 0.0
}

pub(crate) fn vec_to_dvector(v: &[f64]) -> DVector<f64> {
    DVector::from_row_slice(v)
}

/// Ordered semi-axis lengths, ascending. Zero entries mark singular
/// (flat) directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiAxes(Vec<f64>);

impl SemiAxes {
    fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        SemiAxes(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0[0]
    }

    pub fn max(&self) -> f64 {
        *self.0.last().unwrap()
    }
}

#[derive(Serialize, Deserialize)]
struct QuadricRaw {
    center: Vec<f64>,
    shape: SymMatrix,
}

/// Solution set of (x - m)' A (x - m) <= 1 with A symmetric PSD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QuadricRaw", into = "QuadricRaw")]
pub struct QuadricEllipsoid {
    center: DVector<f64>,
    shape: SymMatrix,
}

impl TryFrom<QuadricRaw> for QuadricEllipsoid {
    type Error = Error;
    fn try_from(raw: QuadricRaw) -> Result<Self> {
        QuadricEllipsoid::new(raw.center, raw.shape)
    }
}

impl From<QuadricEllipsoid> for QuadricRaw {
    fn from(e: QuadricEllipsoid) -> Self {
        QuadricRaw {
            center: e.center.iter().copied().collect(),
            shape: e.shape,
        }
    }
}

impl QuadricEllipsoid {
    pub fn new(center: Vec<f64>, shape: SymMatrix) -> Result<Self> {
        check_dim(shape.dim())?;
        check_same_dim(shape.dim(), center.len())?;
        psd_eigen(&shape, "quadric shape matrix has a negative eigenvalue")?;
        Ok(QuadricEllipsoid {
            center: vec_to_dvector(&center),
            shape,
        })
    }

    pub fn unit_ball(dim: usize) -> Self {
        QuadricEllipsoid::new(vec![0.0; dim], SymMatrix::identity(dim)).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn shape(&self) -> &SymMatrix {
        &self.shape
    }

    /// PD shape matrix (bounded set with interior)?
    pub fn is_regular(&self) -> bool {
        self.shape.sym_eigen().map(|e| is_pd(&e)).unwrap_or(false)
    }

    /// 1 - (x - m)' A (x - m); non-negative inside, zero on the boundary.
    pub fn membership_slack(&self, x: &DVector<f64>) -> f64 {
        let d = x - &self.center;
        1.0 - self.shape.quad_form(&d)
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.membership_slack(x) >= -MEMBERSHIP_TOL
    }

    /// Semi-axes as eigenvalue powers -1/2 of the shape matrix; requires PD.
    pub fn semi_axes(&self) -> Result<SemiAxes> {
        let e = psd_eigen(&self.shape, "quadric shape matrix not PSD")?;
        if !is_pd(&e) {
            return Err(Error::SingularRepresentation(
                "quadric shape matrix is singular; semi-axes are unbounded",
            ));
        }
        Ok(SemiAxes::from_unsorted(
            e.values.iter().map(|l| 1.0 / l.sqrt()).collect(),
        ))
    }

    /// Image-form affine map with P = A^{-1/2} on the range of A; singular
    /// directions of A map to the center plane (P gets a zero eigenvalue).
    pub fn to_affine(&self) -> AffineMap {
        let e = self.shape.sym_eigen().expect("validated at construction");
        let scale = e.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let p = e.spectral_map(|l| {
            if l > PSD_REL_TOL * scale {
                1.0 / l.sqrt()
            } else {
                0.0
            }
        });
        AffineMap {
            mode: MapMode::Image,
            p,
            t: self.center.clone(),
        }
    }

    /// Homogeneous point form: M = [[-1, -(A'm)'], [-(A'm), A']] with
    /// A' = A / (1 - m'Am). X' M X <= 0 iff x inside. Requires the origin
    /// strictly interior, i.e. 1 - m'Am > 0.
    pub fn to_homogeneous(&self) -> Result<HomogeneousQuadric> {
        let m_am = self.shape.quad_form(&self.center);
        let margin = 1.0 - m_am;
        if margin <= 1e-12 * (1.0 + m_am.abs()) {
            return Err(Error::OriginNotInterior { margin });
        }
        let d = self.dim();
        let a_prime = self.shape.scale(1.0 / margin);
        let am = a_prime.mul_vec(&self.center);
        let m = SymMatrix::from_fn(d + 1, |i, j| match (i, j) {
            (0, 0) => -1.0,
            (i, 0) => -am[i - 1],
            (i, j) => a_prime.get(i - 1, j - 1),
        });
        Ok(HomogeneousQuadric {
            kind: HomogeneousKind::Point,
            m,
        })
    }

    /// Dual region of non-intersecting hyperplane normals:
    /// B' = A^{-1} - m m', c = -(B')^{-1} m, B = B' / (1 + c'B'c).
    /// Requires A PD and the origin strictly interior (m'Am < 1) so that B'
    /// is positive definite.
    pub fn to_dual(&self) -> Result<DualEllipsoid> {
        let e = psd_eigen(&self.shape, "quadric shape matrix not PSD")?;
        if !is_pd(&e) {
            return Err(Error::SingularRepresentation(
                "dual form needs a positive definite shape matrix",
            ));
        }
        let m_am = self.shape.quad_form(&self.center);
        let margin = 1.0 - m_am;
        if margin <= 1e-12 * (1.0 + m_am.abs()) {
            return Err(Error::OriginNotInterior { margin });
        }
        let a_inv = e.spectral_map(|l| 1.0 / l);
        let b_prime = SymMatrix::lin_comb(
            1.0,
            &a_inv,
            -1.0,
            &SymMatrix::from_rank_one(&self.center),
        );
        let bp_eigen = psd_eigen(&b_prime, "dual centered matrix not PSD")?;
        let bp_inv = bp_eigen.spectral_map(|l| 1.0 / l);
        let c = -bp_inv.mul_vec(&self.center);
        let denom = 1.0 + b_prime.quad_form(&c);
        Ok(DualEllipsoid {
            b: b_prime.scale(1.0 / denom),
            c,
        })
    }

    /// Homogeneous dual form N = [[-1, m'], [m, A^{-1} - m m']]. Unlike
    /// `to_dual` this never needs the origin inside: the lower block may be
    /// indefinite, in which case the normals region is unbounded and no
    /// `DualEllipsoid` exists.
    pub fn to_homogeneous_dual(&self) -> Result<HomogeneousQuadric> {
        let e = psd_eigen(&self.shape, "quadric shape matrix not PSD")?;
        if !is_pd(&e) {
            return Err(Error::SingularRepresentation(
                "homogeneous dual form needs a positive definite shape matrix",
            ));
        }
        let a_inv = e.spectral_map(|l| 1.0 / l);
        let d = self.dim();
        let m = SymMatrix::from_fn(d + 1, |i, j| match (i, j) {
            (0, 0) => -1.0,
            (i, 0) => self.center[i - 1],
            (i, j) => a_inv.get(i - 1, j - 1) - self.center[i - 1] * self.center[j - 1],
        });
        Ok(HomogeneousQuadric {
            kind: HomogeneousKind::Dual,
            m,
        })
    }

    /// Volume: kappa_d times the product of the semi-axes.
    pub fn volume(&self) -> Result<f64> {
        crate::size::SizeFunction::Volume.eval(self.semi_axes()?.values())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapMode {
    /// E = { P y + t : |y| <= 1 }.
    #[serde(rename = "image")]
    Image,
    /// E = { x : |P x + t| <= 1 }.
    #[serde(rename = "preimage")]
    PreImage,
}

#[derive(Serialize, Deserialize)]
struct AffineRaw {
    #[serde(rename = "P")]
    p: SymMatrix,
    t: Vec<f64>,
    mode: MapMode,
}

/// Symmetric-matrix affine parametrization of an ellipsoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AffineRaw", into = "AffineRaw")]
pub struct AffineMap {
    mode: MapMode,
    p: SymMatrix,
    t: DVector<f64>,
}

impl TryFrom<AffineRaw> for AffineMap {
    type Error = Error;
    fn try_from(raw: AffineRaw) -> Result<Self> {
        match raw.mode {
            MapMode::Image => AffineMap::image(raw.p, raw.t),
            MapMode::PreImage => AffineMap::preimage(raw.p, raw.t),
        }
    }
}

impl From<AffineMap> for AffineRaw {
    fn from(f: AffineMap) -> Self {
        AffineRaw {
            p: f.p,
            t: f.t.iter().copied().collect(),
            mode: f.mode,
        }
    }
}

impl AffineMap {
    /// Image-form map; P must be symmetric PSD (flat ellipsoids allowed).
    pub fn image(p: SymMatrix, t: Vec<f64>) -> Result<Self> {
        check_dim(p.dim())?;
        check_same_dim(p.dim(), t.len())?;
        psd_eigen(&p, "image map matrix has a negative eigenvalue")?;
        Ok(AffineMap {
            mode: MapMode::Image,
            p,
            t: vec_to_dvector(&t),
        })
    }

    /// PreImage-form map; P must be symmetric positive definite, otherwise
    /// the sublevel set is unbounded.
    pub fn preimage(p: SymMatrix, t: Vec<f64>) -> Result<Self> {
        check_dim(p.dim())?;
        check_same_dim(p.dim(), t.len())?;
        let e = psd_eigen(&p, "preimage map matrix has a negative eigenvalue")?;
        if !is_pd(&e) {
            return Err(Error::SingularRepresentation(
                "preimage map matrix must be positive definite",
            ));
        }
        Ok(AffineMap {
            mode: MapMode::PreImage,
            p,
            t: vec_to_dvector(&t),
        })
    }

    /// Image form of a general (possibly non-symmetric) linear map Q via the
    /// left polar factor: P = (Q Q')^{1/2} images the unit ball identically.
    pub fn image_from_general(q: &DMatrix<f64>, t: Vec<f64>) -> Result<Self> {
        if q.nrows() != q.ncols() {
            return Err(Error::DimensionMismatch {
                expected: q.nrows(),
                actual: q.ncols(),
            });
        }
        let qqt = SymMatrix::symmetrized(&(q * q.transpose()));
        let p = psd_eigen(&qqt, "general map gram matrix not PSD")?
            .spectral_map(|l| l.max(0.0).sqrt());
        AffineMap::image(p, t)
    }

    pub fn unit_ball(dim: usize) -> Self {
        AffineMap::image(SymMatrix::identity(dim), vec![0.0; dim]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    pub fn mode(&self) -> MapMode {
        self.mode
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.p
    }

    pub fn offset(&self) -> &DVector<f64> {
        &self.t
    }

    pub fn center(&self) -> Result<DVector<f64>> {
        match self.mode {
            MapMode::Image => Ok(self.t.clone()),
            MapMode::PreImage => {
                let e = self.p.sym_eigen()?;
                if !is_pd(&e) {
                    return Err(Error::SingularRepresentation(
                        "preimage map matrix is singular",
                    ));
                }
                Ok(-e.spectral_map(|l| 1.0 / l).mul_vec(&self.t))
            }
        }
    }

    /// Semi-axes: eigenvalues of P for Image, their reciprocals for PreImage.
    pub fn semi_axes(&self) -> Result<SemiAxes> {
        let e = psd_eigen(&self.p, "affine map matrix not PSD")?;
        match self.mode {
            MapMode::Image => Ok(SemiAxes::from_unsorted(
                e.values.iter().map(|l| l.max(0.0)).collect(),
            )),
            MapMode::PreImage => {
                if !is_pd(&e) {
                    return Err(Error::SingularRepresentation(
                        "preimage map matrix is singular",
                    ));
                }
                Ok(SemiAxes::from_unsorted(
                    e.values.iter().map(|l| 1.0 / l).collect(),
                ))
            }
        }
    }

    /// Quadric form. Image: A = P^{-2}, m = t (P must be PD).
    /// PreImage: A = P^2, m = -P^{-1} t.
    pub fn to_quadric(&self) -> Result<QuadricEllipsoid> {
        let e = psd_eigen(&self.p, "affine map matrix not PSD")?;
        if !is_pd(&e) {
            return Err(Error::SingularRepresentation(
                "affine map matrix is singular; no quadric form exists",
            ));
        }
        match self.mode {
            MapMode::Image => Ok(QuadricEllipsoid {
                center: self.t.clone(),
                shape: e.spectral_map(|l| 1.0 / (l * l)),
            }),
            MapMode::PreImage => {
                let p_inv = e.spectral_map(|l| 1.0 / l);
                Ok(QuadricEllipsoid {
                    center: -p_inv.mul_vec(&self.t),
                    shape: e.spectral_map(|l| l * l),
                })
            }
        }
    }

    /// Membership slack: non-negative inside. Image mode measures in the
    /// pre-image of the unit ball through the pseudo-inverse, so flat
    /// ellipsoids still answer correctly (off-plane points read negative).
    pub fn membership_slack(&self, x: &DVector<f64>) -> f64 {
        match self.mode {
            MapMode::PreImage => 1.0 - (self.p.mul_vec(x) + &self.t).norm(),
            MapMode::Image => {
                let e = self.p.sym_eigen().expect("validated at construction");
                let scale = e.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                let diff = x - &self.t;
                // coordinates of x - t in the eigenbasis
                let coords = e.vectors.transpose() * &diff;
                let mut inside = 0.0;
                let mut off_plane = 0.0;
                for (i, &l) in e.values.iter().enumerate() {
                    if l > PSD_REL_TOL * scale.max(1e-300) {
                        inside += (coords[i] / l).powi(2);
                    } else {
                        off_plane += coords[i].powi(2);
                    }
                }
                if off_plane.sqrt() > MEMBERSHIP_TOL {
                    -off_plane.sqrt()
                } else {
                    1.0 - inside.sqrt()
                }
            }
        }
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.membership_slack(x) >= -MEMBERSHIP_TOL
    }

    /// Support function h(u) = u.t + |P u| for Image maps; `u` must be unit.
    pub fn support(&self, u: &DVector<f64>) -> Result<f64> {
        if self.mode != MapMode::Image {
            return Err(Error::InvalidParameter(
                "support function is implemented for image-form maps; convert first".into(),
            ));
        }
        check_same_dim(self.dim(), u.len())?;
        if (u.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "support direction must be unit length, |u| = {}",
                u.norm()
            )));
        }
        Ok(u.dot(&self.t) + self.p.mul_vec(u).norm())
    }

    /// Boundary point P y + t for a unit parameter vector y (Image mode).
    pub fn boundary_point(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        if self.mode != MapMode::Image {
            return Err(Error::InvalidParameter(
                "boundary parametrization applies to image-form maps".into(),
            ));
        }
        Ok(self.p.mul_vec(y) + &self.t)
    }

    /// Axis-aligned bounding box of an Image-form ellipsoid: the support
    /// value in each +-axis direction.
    pub fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.mode != MapMode::Image {
            return Err(Error::InvalidParameter(
                "bounding box applies to image-form maps".into(),
            ));
        }
        let d = self.dim();
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for i in 0..d {
            let ei = DVector::from_fn(d, |j, _| if i == j { 1.0 } else { 0.0 });
            let radius = self.p.mul_vec(&ei).norm();
            lo.push(self.t[i] - radius);
            hi.push(self.t[i] + radius);
        }
        Ok((lo, hi))
    }

    pub fn volume(&self) -> Result<f64> {
        crate::size::SizeFunction::Volume.eval(self.semi_axes()?.values())
    }
}

/// Whether an ellipsoid lies inside the convex hull of two others, probed by
/// support-function dominance h_E(u) <= max(h_E0(u), h_E1(u)) over `n_dirs`
/// seeded unit directions. Returns the worst margin min(max(h0, h1) - h_E);
/// containment within tolerance means margin >= -1e-9. Exact in the
/// dense-direction limit because all three sets are compact and convex.
pub fn ellipsoid_in_convex_hull(
    e: &AffineMap,
    e0: &AffineMap,
    e1: &AffineMap,
    n_dirs: usize,
) -> Result<(bool, f64)> {
    if n_dirs < 64 {
        return Err(Error::InvalidParameter(format!(
            "need at least 64 probe directions, got {n_dirs}"
        )));
    }
    let d = e.dim();
    check_same_dim(d, e0.dim())?;
    check_same_dim(d, e1.dim())?;
    let mut rng = crate::sample::rng_from_seed(0x5EED_D125);
    let mut worst = f64::INFINITY;
    for _ in 0..n_dirs {
        let u = crate::sample::unit_vector(&mut rng, d);
        let h = e.support(&u)?;
        let h0 = e0.support(&u)?;
        let h1 = e1.support(&u)?;
        worst = worst.min(h0.max(h1) - h);
    }
    Ok((worst >= -1e-9, worst))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomogeneousKind {
    /// X' M X <= 0 for X = (1, x) selects the ellipsoid's points.
    Point,
    /// U' N U <= 0 for U = (1, u) selects normals of non-intersecting
    /// hyperplanes u.x = 1.
    Dual,
}

#[derive(Serialize, Deserialize)]
struct HomogeneousRaw {
    #[serde(rename = "M")]
    m: SymMatrix,
    kind: HomogeneousKind,
}

/// Homogeneous-coordinate quadric: one symmetric (d+1)x(d+1) matrix, top-left
/// entry normalized to -1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HomogeneousRaw", into = "HomogeneousRaw")]
pub struct HomogeneousQuadric {
    kind: HomogeneousKind,
    m: SymMatrix,
}

impl TryFrom<HomogeneousRaw> for HomogeneousQuadric {
    type Error = Error;
    fn try_from(raw: HomogeneousRaw) -> Result<Self> {
        HomogeneousQuadric::new(raw.kind, raw.m)
    }
}

impl From<HomogeneousQuadric> for HomogeneousRaw {
    fn from(h: HomogeneousQuadric) -> Self {
        HomogeneousRaw {
            m: h.m,
            kind: h.kind,
        }
    }
}

impl HomogeneousQuadric {
    /// Accepts a symmetric matrix with negative top-left entry and rescales
    /// it to the -1 normalization.
    pub fn new(kind: HomogeneousKind, m: SymMatrix) -> Result<Self> {
        if m.dim() < 2 {
            return Err(Error::DimensionOutOfRange(0));
        }
        check_dim(m.dim() - 1)?;
        let m00 = m.get(0, 0);
        if !(m00 < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "homogeneous matrix needs a negative top-left entry for the -1 \
                 normalization, got {m00}"
            )));
        }
        Ok(HomogeneousQuadric {
            kind,
            m: m.scale(-1.0 / m00),
        })
    }

    pub fn kind(&self) -> HomogeneousKind {
        self.kind
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.m
    }

    /// Ambient dimension d (matrix is (d+1)x(d+1)).
    pub fn dim(&self) -> usize {
        self.m.dim() - 1
    }

    /// X' M X for X = (1, x).
    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        let d = self.dim();
        assert_eq!(x.len(), d);
        let hx = DVector::from_fn(d + 1, |i, _| if i == 0 { 1.0 } else { x[i - 1] });
        self.m.quad_form(&hx)
    }

    /// Lower-right d x d block.
    pub fn lower_block(&self) -> SymMatrix {
        SymMatrix::from_fn(self.dim(), |i, j| self.m.get(i + 1, j + 1))
    }

    /// Off-diagonal d-vector (first column below the top-left entry).
    pub fn off_diag(&self) -> DVector<f64> {
        DVector::from_fn(self.dim(), |i, _| self.m.get(i + 1, 0))
    }

    /// Does this matrix still describe a bounded nonempty ellipsoid?
    /// Point kind: the lower block must be PD. Dual kind: the recovered
    /// inverse shape Q = W + v v' must be PD.
    pub fn is_ellipsoid(&self) -> bool {
        let w = self.lower_block();
        let candidate = match self.kind {
            HomogeneousKind::Point => w,
            HomogeneousKind::Dual => SymMatrix::lin_comb(
                1.0,
                &w,
                1.0,
                &SymMatrix::from_rank_one(&self.off_diag()),
            ),
        };
        candidate.sym_eigen().map(|e| is_pd(&e)).unwrap_or(false)
    }

    /// Recovers the point-form quadric.
    /// Point kind: m = -W^{-1} v, A = W / (1 + m'Wm).
    /// Dual kind: A = (W + v v')^{-1}, m = v.
    pub fn to_quadric(&self) -> Result<QuadricEllipsoid> {
        let w = self.lower_block();
        let v = self.off_diag();
        match self.kind {
            HomogeneousKind::Point => {
                let e = w.sym_eigen()?;
                if !is_pd(&e) {
                    return Err(Error::SingularRepresentation(
                        "homogeneous point form has a non-PD lower block",
                    ));
                }
                let center = -e.spectral_map(|l| 1.0 / l).mul_vec(&v);
                let denom = 1.0 + w.quad_form(&center);
                Ok(QuadricEllipsoid {
                    center,
                    shape: w.scale(1.0 / denom),
                })
            }
            HomogeneousKind::Dual => {
                let q = SymMatrix::lin_comb(1.0, &w, 1.0, &SymMatrix::from_rank_one(&v));
                let e = q.sym_eigen()?;
                if !is_pd(&e) {
                    return Err(Error::SingularRepresentation(
                        "homogeneous dual form does not describe an ellipsoid",
                    ));
                }
                Ok(QuadricEllipsoid {
                    center: v,
                    shape: e.spectral_map(|l| 1.0 / l),
                })
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DualRaw {
    #[serde(rename = "B")]
    b: SymMatrix,
    c: Vec<f64>,
}

/// Normal-coordinate dual: hyperplanes u.x = 1 that miss the ellipsoid form
/// (u - c)' B (u - c) <= 1. Valid whenever B is PSD and c'Bc < 1 (the origin
/// is interior to the primal).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DualRaw", into = "DualRaw")]
pub struct DualEllipsoid {
    b: SymMatrix,
    c: DVector<f64>,
}

impl TryFrom<DualRaw> for DualEllipsoid {
    type Error = Error;
    fn try_from(raw: DualRaw) -> Result<Self> {
        DualEllipsoid::new(raw.b, raw.c)
    }
}

impl From<DualEllipsoid> for DualRaw {
    fn from(e: DualEllipsoid) -> Self {
        DualRaw {
            b: e.b,
            c: e.c.iter().copied().collect(),
        }
    }
}

impl DualEllipsoid {
    pub fn new(b: SymMatrix, c: Vec<f64>) -> Result<Self> {
        check_dim(b.dim())?;
        check_same_dim(b.dim(), c.len())?;
        psd_eigen(&b, "dual matrix has a negative eigenvalue")?;
        let c = vec_to_dvector(&c);
        let cbc = b.quad_form(&c);
        if cbc >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "dual normalization requires c'Bc < 1, got {cbc}"
            )));
        }
        Ok(DualEllipsoid { b, c })
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.b
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.c
    }

    /// Un-normalized centered matrix B' = B / (1 - c'Bc).
    pub fn b_prime(&self) -> SymMatrix {
        self.b.scale(1.0 / (1.0 - self.b.quad_form(&self.c)))
    }

    /// Q = B'cc'B' + B', the inverse shape matrix of the primal ellipsoid.
    pub fn q_matrix(&self) -> SymMatrix {
        let bp = self.b_prime();
        let bpc = bp.mul_vec(&self.c);
        SymMatrix::lin_comb(1.0, &SymMatrix::from_rank_one(&bpc), 1.0, &bp)
    }

    /// Semi-axes: square roots of Q's eigenvalues.
    pub fn semi_axes(&self) -> Result<SemiAxes> {
        let e = psd_eigen(&self.q_matrix(), "dual inverse-shape matrix not PSD")?;
        Ok(SemiAxes::from_unsorted(
            e.values.iter().map(|l| l.max(0.0).sqrt()).collect(),
        ))
    }

    /// Primal quadric: A = Q^{-1}, m = -B'c.
    pub fn to_quadric(&self) -> Result<QuadricEllipsoid> {
        let e = psd_eigen(&self.q_matrix(), "dual inverse-shape matrix not PSD")?;
        if !is_pd(&e) {
            return Err(Error::SingularRepresentation(
                "dual describes a flat ellipsoid; no quadric form exists",
            ));
        }
        Ok(QuadricEllipsoid {
            center: -self.b_prime().mul_vec(&self.c),
            shape: e.spectral_map(|l| 1.0 / l),
        })
    }

    /// Homogeneous dual matrix N = [[-1, m'], [m, B']] with m = -B'c.
    pub fn to_homogeneous(&self) -> HomogeneousQuadric {
        let bp = self.b_prime();
        let m = -bp.mul_vec(&self.c);
        let d = self.dim();
        HomogeneousQuadric {
            kind: HomogeneousKind::Dual,
            m: SymMatrix::from_fn(d + 1, |i, j| match (i, j) {
                (0, 0) => -1.0,
                (i, 0) => m[i - 1],
                (i, j) => bp.get(i - 1, j - 1),
            }),
        }
    }

    /// Membership of a hyperplane normal in the non-intersecting region.
    pub fn contains_normal(&self, u: &DVector<f64>) -> bool {
        let d = u - &self.c;
        self.b.quad_form(&d) <= 1.0 + MEMBERSHIP_TOL
    }
}

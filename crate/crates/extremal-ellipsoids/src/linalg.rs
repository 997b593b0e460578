//! Packed symmetric matrices and a cyclic Jacobi eigensolver.
//!
//! Every matrix this crate cares about (shape matrices, dual matrices, the
//! homogeneous (d+1)x(d+1) form) is symmetric and small, so we store the lower
//! triangle only and diagonalize with Jacobi rotations, which are simple to
//! audit for accuracy at these sizes.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sweep cap for the Jacobi iteration. Convergence is quadratic once the
/// off-diagonal mass is small; matrices up to 17x17 settle in well under ten
/// sweeps, so hitting the cap signals corrupt input (NaN/inf).
const MAX_SWEEPS: usize = 100;

/// Off-diagonal Frobenius threshold, relative to the scale of the input.
const JACOBI_TOL: f64 = 1e-14;

/// Symmetric matrix with packed row-major lower-triangular storage.
///
/// Serializes as a full square array of rows; deserialization rejects input
/// whose asymmetry exceeds 1e-9 relative and averages away anything smaller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

#[inline]
fn packed_index(i: usize, j: usize) -> usize {
    // caller guarantees j <= i
    i * (i + 1) / 2 + j
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "empty matrix");
        SymMatrix {
            dim,
            data: vec![0.0; dim * (dim + 1) / 2],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut s = Self::zeros(dim);
        for i in 0..dim {
            s.set(i, i, 1.0);
        }
        s
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut s = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            s.set(i, i, v);
        }
        s
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut s = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..=i {
                s.set(i, j, f(i, j));
            }
        }
        s
    }

    /// Rank-one matrix v·vᵀ.
    pub fn from_rank_one(v: &DVector<f64>) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    /// Builds from a square dense matrix, rejecting asymmetry beyond 1e-9
    /// relative and averaging mismatches below it.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: m.nrows().max(1),
                actual: m.ncols(),
            });
        }
        let n = m.nrows();
        for i in 0..n {
            for j in 0..i {
                let a = m[(i, j)];
                let b = m[(j, i)];
                let delta = (a - b).abs();
                if delta > 1e-9 * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::Asymmetric { i, j, delta });
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| {
            if i == j {
                m[(i, i)]
            } else {
                0.5 * (m[(i, j)] + m[(j, i)])
            }
        }))
    }

    /// Symmetrizes (M + Mᵀ)/2 without an asymmetry check. Meant for products
    /// like V·D·Vᵀ that are symmetric up to roundoff.
    pub fn symmetrized(m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        self.data[packed_index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        self.data[packed_index(i, j)] = v;
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.dim);
        DVector::from_fn(self.dim, |i, _| {
            (0..self.dim).map(|j| self.get(i, j) * x[j]).sum()
        })
    }

    /// xᵀ·S·x.
    pub fn quad_form(&self, x: &DVector<f64>) -> f64 {
        self.mul_vec(x).dot(x)
    }

    pub fn scale(&self, f: f64) -> Self {
        SymMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| v * f).collect(),
        }
    }

    /// alpha·A + beta·B.
    pub fn lin_comb(alpha: f64, a: &SymMatrix, beta: f64, b: &SymMatrix) -> Self {
        assert_eq!(a.dim, b.dim);
        SymMatrix {
            dim: a.dim,
            data: a
                .data
                .iter()
                .zip(&b.data)
                .map(|(x, y)| alpha * x + beta * y)
                .collect(),
        }
    }

    pub fn frob_norm(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.dim {
            for j in 0..=i {
                let v = self.data[packed_index(i, j)];
                let w = if i == j { 1.0 } else { 2.0 };
                sum += w * v * v;
            }
        }
        sum.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Frobenius distance to another symmetric matrix of the same dimension.
    pub fn frob_dist(&self, other: &SymMatrix) -> f64 {
        Self::lin_comb(1.0, self, -1.0, other).frob_norm()
    }

    /// Eigendecomposition by cyclic Jacobi rotations. Values come back in
    /// ascending order with matching columns in `vectors`.
    pub fn sym_eigen(&self) -> Result<SymEigen> {
        let n = self.dim;
        let mut a = self.to_dense();
        let mut v = DMatrix::<f64>::identity(n, n);
        let tol = JACOBI_TOL * self.frob_norm().max(1.0);

        let mut sweeps = 0;
        while off_diag_frob(&a) > tol {
            if sweeps >= MAX_SWEEPS {
                return Err(Error::EigenNonConvergence {
                    residual: off_diag_frob(&a),
                    sweeps,
                });
            }
            sweeps += 1;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;

                    let app = a[(p, p)];
                    let aqq = a[(q, q)];
                    a[(p, p)] = app - t * apq;
                    a[(q, q)] = aqq + t * apq;
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    for i in 0..n {
                        if i == p || i == q {
                            continue;
                        }
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = c * aip - s * aiq;
                        a[(p, i)] = a[(i, p)];
                        a[(i, q)] = s * aip + c * aiq;
                        a[(q, i)] = a[(i, q)];
                    }
                    for i in 0..n {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = c * vip - s * viq;
                        v[(i, q)] = s * vip + c * viq;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
        let vectors = DMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
        Ok(SymEigen { values, vectors })
    }

    /// Ascending eigenvalues only.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.sym_eigen()?.values)
    }

    /// Determinant via the spectrum.
    pub fn det(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().product())
    }
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n.max(1),
                actual: rows.iter().map(|r| r.len()).max().unwrap_or(0),
            });
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::from_dense(&m)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(s: SymMatrix) -> Self {
        (0..s.dim)
            .map(|i| (0..s.dim).map(|j| s.get(i, j)).collect())
            .collect()
    }
}

fn off_diag_frob(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..i {
            sum += 2.0 * a[(i, j)] * a[(i, j)];
        }
    }
    sum.sqrt()
}

/// Result of [`SymMatrix::sym_eigen`]: `values` ascending, `vectors` columns
/// are the matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    /// V·diag(f(lambda))·Vᵀ.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.values.len();
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            n,
            self.values.iter().map(|&l| f(l)),
        ));
        SymMatrix::symmetrized(&(&self.vectors * d * self.vectors.transpose()))
    }

    pub fn recompose(&self) -> SymMatrix {
        self.spectral_map(|l| l)
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

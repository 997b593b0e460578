//! Seeded sampling helpers shared by probes, containment checkers and tests.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::SymMatrix;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal deviate (Box-Muller).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.random();
        if u1 <= f64::MIN_POSITIVE {
            continue;
        }
        let u2: f64 = rng.random();
        return (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
    }
}

/// Uniform direction on the unit sphere.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| gaussian(rng));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the sign
/// of R's diagonal folded into Q).
pub fn haar_orthogonal<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            for i in 0..dim {
                q[(i, j)] *= -1.0;
            }
        }
    }
    q
}

/// Symmetric matrix with the given spectrum in a Haar-random eigenbasis.
pub fn symmetric_with_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[f64]) -> SymMatrix {
    let v = haar_orthogonal(rng, spectrum.len());
    let d = DMatrix::from_diagonal(&DVector::from_row_slice(spectrum));
    SymMatrix::symmetrized(&(&v * d * v.transpose()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vectors_have_unit_norm() {
        let mut rng = rng_from_seed(1);
        for d in 1..=5 {
            for _ in 0..20 {
                let v = unit_vector(&mut rng, d);
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn haar_matrices_are_orthogonal() {
        let mut rng = rng_from_seed(2);
        for d in 1..=6 {
            let q = haar_orthogonal(&mut rng, d);
            let qtq = q.transpose() * &q;
            for i in 0..d {
                for j in 0..d {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((qtq[(i, j)] - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn prescribed_spectrum_survives_conjugation() {
        let mut rng = rng_from_seed(3);
        let spectrum = [0.5, 2.0, 7.0];
        let s = symmetric_with_spectrum(&mut rng, &spectrum);
        let e = s.eigenvalues().unwrap();
        for (got, want) in e.iter().zip(&spectrum) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn seeded_rng_is_reproducible() {
        let a: Vec<f64> = {
            let mut rng = rng_from_seed(9);
            (0..5).map(|_| gaussian(&mut rng)).collect()
        };
        let b: Vec<f64> = {
            let mut rng = rng_from_seed(9);
            (0..5).map(|_| gaussian(&mut rng)).collect()
        };
        assert_eq!(a, b);
    }
}

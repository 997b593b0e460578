//! Seeded instance generators for checkers, solvers and test suites.

use nalgebra::DVector;
use rand::Rng;

use crate::ellipsoid::{AffineMap, DualEllipsoid, HomogeneousQuadric, QuadricEllipsoid};
use crate::linalg::SymMatrix;
use crate::sample::{symmetric_with_spectrum, unit_vector};

/// Regular ellipsoid with semi-axes in [0.4, 2.5] and center within `spread`
/// of the origin.
pub fn random_regular_quadric<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    spread: f64,
) -> QuadricEllipsoid {
    let spectrum: Vec<f64> = (0..dim)
        .map(|_| {
            let axis = rng.random_range(0.4..2.5);
            1.0 / (axis * axis)
        })
        .collect();
    let shape = symmetric_with_spectrum(rng, &spectrum);
    let center: Vec<f64> = (0..dim)
        .map(|_| rng.random_range(-spread..spread))
        .collect();
    QuadricEllipsoid::new(center, shape).unwrap()
}

/// Pair of image-form ellipsoids with moderate axes and centers.
pub fn random_image_pair<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> (AffineMap, AffineMap) {
    let draw = |rng: &mut R| {
        let spectrum: Vec<f64> = (0..dim).map(|_| rng.random_range(0.3..2.5)).collect();
        let p = symmetric_with_spectrum(rng, &spectrum);
        let t: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        AffineMap::image(p, t).unwrap()
    };
    (draw(rng), draw(rng))
}

/// Pair of preimage-form ellipsoids that both contain a ball of radius about
/// 0.35 around the origin, so their intersection has usable volume for
/// rejection sampling.
pub fn random_overlapping_preimage_pair<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
) -> (AffineMap, AffineMap) {
    let draw = |rng: &mut R| {
        let spectrum: Vec<f64> = (0..dim)
            .map(|_| {
                let axis = rng.random_range(0.6..1.6);
                1.0 / axis
            })
            .collect();
        let p = symmetric_with_spectrum(rng, &spectrum);
        let center: Vec<f64> = (0..dim).map(|_| rng.random_range(-0.25..0.25)).collect();
        let t = -p.mul_vec(&DVector::from_row_slice(&center));
        AffineMap::preimage(p, t.iter().copied().collect()).unwrap()
    };
    (draw(rng), draw(rng))
}

/// Pair of valid 2D duals: primals keep the origin deep inside so both
/// normalized dual forms exist.
pub fn random_dual_pair<R: Rng + ?Sized>(rng: &mut R) -> (DualEllipsoid, DualEllipsoid) {
    let draw = |rng: &mut R| {
        random_regular_quadric(rng, 2, 0.12).to_dual().unwrap()
    };
    (draw(rng), draw(rng))
}

/// Two congruent thin ellipses far apart on the y-axis, as homogeneous dual
/// matrices. Valid duals in isolation, but mid-interval convex combinations
/// of their matrices stop describing ellipsoids: the useful combination
/// range shrinks to a small neighborhood of each endpoint.
pub fn far_apart_thin_dual_pair() -> (HomogeneousQuadric, HomogeneousQuadric) {
    let shape = SymMatrix::from_diag(&[0.25, 4.0]);
    let e0 = QuadricEllipsoid::new(vec![0.0, 1.2], shape.clone()).unwrap();
    let e1 = QuadricEllipsoid::new(vec![0.0, -1.2], shape).unwrap();
    (
        e0.to_homogeneous_dual().unwrap(),
        e1.to_homogeneous_dual().unwrap(),
    )
}

/// Point cloud with full affine span (n >= dim + 1 enforced by retry).
pub fn random_point_cloud<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    n: usize,
    spread: f64,
) -> Vec<DVector<f64>> {
    assert!(n > dim, "need more points than dimensions");
    (0..n)
        .map(|_| DVector::from_fn(dim, |_, _| rng.random_range(-spread..spread)))
        .collect()
}

/// Two distinct preimage-form ellipsoids that both enclose `points` and have
/// exactly equal volume. Each starts from a random positive definite matrix,
/// shrinks (in matrix norm) until every point fits, then both are inflated to
/// the smaller of the two determinants; inflation preserves enclosure.
pub fn equal_volume_enclosing_pair<R: Rng + ?Sized>(
    rng: &mut R,
    points: &[DVector<f64>],
) -> (AffineMap, AffineMap) {
    let dim = points[0].len();
    let draw = |rng: &mut R| {
        let spectrum: Vec<f64> = (0..dim).map(|_| rng.random_range(0.5..2.0)).collect();
        let q = symmetric_with_spectrum(rng, &spectrum);
        let center = DVector::from_fn(dim, |_, _| rng.random_range(-0.2..0.2));
        let t = -q.mul_vec(&center);
        let reach = points
            .iter()
            .map(|x| (q.mul_vec(x) + &t).norm())
            .fold(0.0_f64, f64::max)
            .max(1e-9);
        // scale so the farthest point lands exactly on the boundary
        (q.scale(1.0 / reach), t.iter().map(|v| v / reach).collect::<Vec<f64>>())
    };
    let (q0, t0) = draw(rng);
    let (q1, t1) = draw(rng);
    let det0: f64 = q0.det().unwrap();
    let det1: f64 = q1.det().unwrap();
    let target = det0.min(det1);
    let inflate = |q: SymMatrix, t: Vec<f64>, det: f64| {
        let gamma = (target / det).powf(1.0 / dim as f64);
        AffineMap::preimage(
            q.scale(gamma),
            t.iter().map(|v| v * gamma).collect(),
        )
        .unwrap()
    };
    (inflate(q0, t0, det0), inflate(q1, t1, det1))
}

/// Seeded unit directions (convenience wrapper).
pub fn unit_directions<R: Rng + ?Sized>(rng: &mut R, dim: usize, n: usize) -> Vec<DVector<f64>> {
    (0..n).map(|_| unit_vector(rng, dim)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::rng_from_seed;

    #[test]
    fn overlapping_pairs_share_the_origin() {
        let mut rng = rng_from_seed(31);
        for dim in [2usize, 3] {
            for _ in 0..20 {
                let (e0, e1) = random_overlapping_preimage_pair(&mut rng, dim);
                let origin = DVector::zeros(dim);
                assert!(e0.contains(&origin));
                assert!(e1.contains(&origin));
            }
        }
    }

    #[test]
    fn dual_pairs_are_valid() {
        let mut rng = rng_from_seed(32);
        for _ in 0..20 {
            let (d0, d1) = random_dual_pair(&mut rng);
            assert!(d0.to_quadric().is_ok());
            assert!(d1.to_quadric().is_ok());
        }
    }

    #[test]
    fn enclosing_pairs_enclose_with_equal_volume() {
        let mut rng = rng_from_seed(33);
        for dim in [2usize, 3] {
            for _ in 0..10 {
                let points = random_point_cloud(&mut rng, dim, 40, 1.0);
                let (e0, e1) = equal_volume_enclosing_pair(&mut rng, &points);
                for x in &points {
                    assert!(e0.contains(x), "point escaped e0");
                    assert!(e1.contains(x), "point escaped e1");
                }
                let v0 = e0.volume().unwrap();
                let v1 = e1.volume().unwrap();
                assert!((v0 - v1).abs() <= 1e-9 * v0);
                // distinct matrices
                assert!(e0.matrix().frob_dist(e1.matrix()) > 1e-6);
            }
        }
    }

    #[test]
    fn thin_pair_endpoints_are_ellipsoids() {
        let (n0, n1) = far_apart_thin_dual_pair();
        assert!(n0.is_ellipsoid());
        assert!(n1.is_ellipsoid());
    }
}

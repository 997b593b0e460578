//! Property checks for the shipped size functions over seeded draws.

use extremal_ellipsoids::sample::rng_from_seed;
use extremal_ellipsoids::{arc_length, arc_length_with, ModulusConvention, SizeFunction};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn draw_axes(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|_| 10f64.powf(rng.random_range(-2.0..2.0)))
        .collect()
}

fn functions_for(dim: usize) -> Vec<SizeFunction> {
    SizeFunction::builtins()
        .into_iter()
        .filter(|f| f.declared_dim().map_or(true, |d| d == dim))
        .chain(if dim == 2 {
            vec![SizeFunction::ArcLength(ModulusConvention::OneMinusRatio)]
        } else {
            vec![]
        })
        .collect()
}

#[test]
fn every_size_function_is_permutation_symmetric() {
    let mut rng = rng_from_seed(71);
    for case in 0..1000 {
        let dim = 2 + case % 4;
        let axes = draw_axes(&mut rng, dim);
        let mut shuffled = axes.clone();
        shuffled.shuffle(&mut rng);
        for f in functions_for(dim) {
            let a = f.eval(&axes).unwrap();
            let b = f.eval(&shuffled).unwrap();
            assert!(
                (a - b).abs() <= 1e-12 * (1.0 + a.abs()),
                "case {case}: {} not symmetric: {a} vs {b} on {axes:?}",
                f.name()
            );
        }
    }
}

#[test]
fn every_size_function_is_strictly_monotone() {
    let mut rng = rng_from_seed(72);
    for case in 0..1000 {
        let dim = 2 + case % 4;
        let axes = draw_axes(&mut rng, dim);
        // bump one coordinate; strict monotonicity demands a strict increase
        let k = rng.random_range(0..dim);
        let mut bumped = axes.clone();
        bumped[k] += rng.random_range(0.05..1.0) * (1.0 + axes[k]);
        for f in functions_for(dim) {
            assert!(f.strictly_monotone());
            let a = f.eval(&axes).unwrap();
            let b = f.eval(&bumped).unwrap();
            assert!(
                b > a,
                "case {case}: {} not strictly monotone: {a} -> {b}",
                f.name()
            );
        }
    }
}

#[test]
fn size_functions_scale_with_known_homogeneity_degrees() {
    let mut rng = rng_from_seed(73);
    for case in 0..500 {
        let dim = 2 + case % 4;
        let axes = draw_axes(&mut rng, dim);
        let c: f64 = rng.random_range(0.2..5.0);
        let scaled: Vec<f64> = axes.iter().map(|a| a * c).collect();

        let checks: Vec<(SizeFunction, f64)> = vec![
            (SizeFunction::Volume, c.powi(dim as i32)),
            (SizeFunction::Sum, c),
            (SizeFunction::SqrtSum, c.sqrt()),
            (SizeFunction::PNorm(3.0), c),
        ];
        for (f, factor) in checks {
            let a = f.eval(&axes).unwrap();
            let b = f.eval(&scaled).unwrap();
            assert!(
                (b - factor * a).abs() <= 1e-10 * (1.0 + b.abs()),
                "case {case}: {} violates homogeneity",
                f.name()
            );
        }
        if dim == 2 {
            for f in [
                SizeFunction::SquareCounterexample,
                SizeFunction::ArcLength(ModulusConvention::Eccentric),
            ] {
                let a = f.eval(&axes).unwrap();
                let b = f.eval(&scaled).unwrap();
                assert!(
                    (b - c * a).abs() <= 1e-9 * (1.0 + b.abs()),
                    "case {case}: {} violates degree-1 homogeneity",
                    f.name()
                );
            }
        }
    }
}

/// Midpoint-rule quadrature of the ellipse circumference integral
/// 4 * int_0^{pi/2} sqrt(a^2 sin^2 t + b^2 cos^2 t) dt, written without any
/// of the library's elliptic-integral machinery.
fn perimeter_by_quadrature(a: f64, b: f64, n: usize) -> f64 {
    let h = std::f64::consts::FRAC_PI_2 / n as f64;
    let sum: f64 = (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) * h;
            let (s, c) = t.sin_cos();
            (a * a * s * s + b * b * c * c).sqrt()
        })
        .sum();
    4.0 * sum * h
}

#[test]
fn arc_length_matches_direct_quadrature_and_circle_formula() {
    let mut rng = rng_from_seed(74);
    for _ in 0..40 {
        let a: f64 = rng.random_range(0.05..4.0);
        let b: f64 = rng.random_range(0.05..4.0);
        let want = perimeter_by_quadrature(a, b, 200_000);
        let got = arc_length(a, b).unwrap();
        assert!(
            (got - want).abs() <= 1e-8 * (1.0 + want),
            "arc_length({a}, {b}) = {got}, quadrature gives {want}"
        );
        // sqrt(1 - r^2) >= 1 - r and E decreases in the modulus, so the
        // eccentric perimeter can never exceed the one-minus-ratio value
        let other = arc_length_with(a, b, ModulusConvention::OneMinusRatio).unwrap();
        assert!(
            got <= other + 1e-12 * (1.0 + other),
            "convention ordering broken at ({a}, {b}): {got} vs {other}"
        );
    }

    // the two conventions coincide exactly at the circle and the segment
    for (a, b) in [(1.3, 1.3), (0.5, 0.0)] {
        let e = arc_length_with(a, b, ModulusConvention::Eccentric).unwrap();
        let p = arc_length_with(a, b, ModulusConvention::OneMinusRatio).unwrap();
        assert!((e - p).abs() <= 1e-12 * (1.0 + e));
    }

    let r = 0.7;
    let circle = arc_length(r, r).unwrap();
    assert!((circle - 2.0 * std::f64::consts::PI * r).abs() <= 1e-12);

    // degenerate ellipse: the segment traversed twice
    let flat = arc_length(0.5, 0.0).unwrap();
    assert!((flat - 2.0).abs() <= 1e-12);
}

#[test]
fn monotonicity_holds_down_to_the_degenerate_boundary() {
    // axes are allowed to be zero; values must still be ordered
    let f = SizeFunction::Volume;
    assert_eq!(f.eval(&[0.0, 1.0, 2.0]).unwrap(), 0.0);
    let g = SizeFunction::SqrtSum;
    assert!(g.eval(&[0.0, 1.0]).unwrap() < g.eval(&[0.01, 1.0]).unwrap());
    assert!(SizeFunction::parse("pnorm:0.5").is_err());
    assert!(SizeFunction::parse("perimeter").is_err());
}

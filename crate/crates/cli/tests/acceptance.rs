//! Acceptance gate for the workspace. Each test checks one published
//! guarantee end to end (CLI where the guarantee is about a command, library
//! calls otherwise) and prints a single PASS line with the measured numbers.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use serde_json::Value;

use extremal_ellipsoids::instances::{
    equal_volume_enclosing_pair, random_point_cloud, random_regular_quadric,
};
use extremal_ellipsoids::sample::rng_from_seed;
use extremal_ellipsoids::{
    between_preimage, convexity_probe, khachiyan_mvee, multistart_uniqueness, solve_min_enclosing,
    HPolytope, ProbeDomain, ProblemSpec, Property, SizeFunction, SolverConfig,
};

fn run_cli(args: &[&str], out: &Path) -> (i32, Value) {
    let output = Command::new(env!("CARGO_BIN_EXE_extremal"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    let code = output.status.code().unwrap_or(-1);
    let stdout: Value = serde_json::from_slice(&output.stdout).unwrap_or(Value::Null);
    (code, stdout)
}

fn f64_at(v: &Value, path: &[&str]) -> f64 {
    let mut cur = v;
    for p in path {
        cur = &cur[*p];
    }
    cur.as_f64().unwrap_or_else(|| panic!("missing {path:?}"))
}

#[test]
fn square_family_scan_finds_two_minimizers_at_the_closed_form() {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let (code, summary) = run_cli(&["repro-square"], dir.path());
    assert_eq!(code, 0);

    let circle_diff = f64_at(&summary, &["circle_f", "abs_diff"]);
    assert!(circle_diff <= 1e-9, "circle value off by {circle_diff:e}");

    let minimizers = summary["minimizers"].as_array().unwrap();
    assert_eq!(minimizers.len(), 2);
    assert!(summary["distinct_minimizers"].as_bool().unwrap());
    for m in minimizers {
        let f_diff = f64_at(m, &["f", "abs_diff"]);
        let a_diff = f64_at(m, &["alpha_vs_closed_form", "abs_diff"]);
        assert!(f_diff <= 1e-3, "minimizer value off by {f_diff:e}");
        assert!(a_diff <= 1e-6, "minimizer location off by {a_diff:e}");
    }

    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(5), "took {dt:.2?}");
    println!("ACCEPTANCE square family scan: PASS (circle diff {circle_diff:.2e}, {dt:.2?})");
}

#[test]
fn triangle_family_scan_beats_the_incircle_under_both_conventions() {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let (code, summary) = run_cli(&["repro-triangle"], dir.path());
    assert_eq!(code, 0);

    let conventions = summary["conventions"].as_array().unwrap();
    assert_eq!(conventions.len(), 2);
    for conv in conventions {
        let name = conv["convention"].as_str().unwrap();
        let inc = f64_at(conv, &["incircle_f", "abs_diff"]);
        let lim = f64_at(conv, &["limit_f", "abs_diff"]);
        assert!(inc <= 1e-9, "{name}: incircle arc length off by {inc:e}");
        assert!(lim <= 1e-6, "{name}: flat-limit arc length off by {lim:e}");
        assert!(
            conv["scan_max_exceeds_incircle"].as_bool().unwrap(),
            "{name}: the incircle should not be the scan maximum"
        );
    }
    assert!(summary["kink_at_incircle_one_minus_ratio"].as_bool().unwrap());
    assert!(summary["smooth_at_incircle_eccentric"].as_bool().unwrap());
    let tangency = f64_at(&summary, &["tangency_max_err"]);
    assert!(tangency <= 1e-12, "family leaves the sides by {tangency:e}");

    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(10), "took {dt:.2?}");
    println!("ACCEPTANCE triangle family scan: PASS (tangency {tangency:.2e}, {dt:.2?})");
}

#[test]
fn randomized_containment_checks_find_no_violations() {
    let runs: [(&str, &str); 5] = [
        ("1", "2"),
        ("1", "3"),
        ("2", "2"),
        ("2", "3"),
        ("4", "2"),
    ];
    for (lemma, d) in runs {
        let t0 = Instant::now();
        let dir = tempfile::tempdir().unwrap();
        let (code, summary) = run_cli(
            &[
                "verify", "--lemma", lemma, "--d", d, "--trials", "1000", "--seed", "0", "--jobs",
                "4",
            ],
            dir.path(),
        );
        let dt = t0.elapsed();
        assert_eq!(code, 0, "check {lemma} in dimension {d} exited {code}");
        let violations = summary["violations_total"].as_u64().unwrap();
        assert_eq!(violations, 0, "check {lemma} in dimension {d}");
        if lemma != "4" {
            assert_eq!(summary["lambda_grid"].as_array().unwrap().len(), 11);
        }
        assert!(dt < Duration::from_secs(60), "check {lemma} d={d} took {dt:.2?}");
        println!(
            "ACCEPTANCE containment check {lemma} (d={d}): PASS (1000 pairs, 0 violations, {dt:.2?})"
        );
    }
}

#[test]
fn convexity_verdicts_match_between_vector_and_matrix_domains() {
    struct Case {
        f: SizeFunction,
        p: f64,
        property: Property,
        dim: usize,
        expect_holds: bool,
    }
    let cases = [
        Case {
            f: SizeFunction::Volume,
            p: -1.0,
            property: Property::Convex,
            dim: 3,
            expect_holds: true,
        },
        Case {
            f: SizeFunction::Volume,
            p: -0.5,
            property: Property::Convex,
            dim: 3,
            expect_holds: true,
        },
        Case {
            f: SizeFunction::SqrtSum,
            p: 1.0,
            property: Property::Concave,
            dim: 3,
            expect_holds: true,
        },
        Case {
            f: SizeFunction::SquareCounterexample,
            p: -0.5,
            property: Property::Convex,
            dim: 2,
            expect_holds: false,
        },
    ];
    for case in &cases {
        let reports: Vec<_> = [ProbeDomain::Positive, ProbeDomain::Matrices]
            .into_iter()
            .map(|dom| {
                convexity_probe(&case.f, case.p, case.property, dom, case.dim, 10_000, 0).unwrap()
            })
            .collect();
        let verdicts: Vec<bool> = reports.iter().map(|r| r.verdict_holds()).collect();
        assert_eq!(
            verdicts[0], verdicts[1],
            "{} p={}: domains disagree",
            case.f.name(),
            case.p
        );
        assert_eq!(
            verdicts[0],
            case.expect_holds,
            "{} p={}: wrong verdict",
            case.f.name(),
            case.p
        );
        if !case.expect_holds {
            assert!(
                reports.iter().any(|r| r.witness.is_some()),
                "failed property needs a witness segment"
            );
        }
        println!(
            "ACCEPTANCE convexity probe {} p={}: PASS (verdict {} in both domains, 10000 trials)",
            case.f.name(),
            case.p,
            if verdicts[0] { "holds" } else { "fails" }
        );
    }
}

#[test]
fn general_volume_solver_matches_the_dedicated_mvee_on_fifty_clouds() {
    let t0 = Instant::now();
    let mut worst_vol = 0.0_f64;
    let mut worst_shape = 0.0_f64;
    for case in 0..50 {
        let mut rng = rng_from_seed(9100 + case as u64);
        let dim = 2 + case % 2;
        let n = 20 + (case * 7) % 181;
        let points = random_point_cloud(&mut rng, dim, n, 1.5);

        let general =
            solve_min_enclosing(&points, &SizeFunction::Volume, &SolverConfig::default()).unwrap();
        let mvee = khachiyan_mvee(&points, 1e-6).unwrap();
        assert!(general.converged, "case {case} did not converge");

        let (vg, vk) = (
            general.ellipsoid.volume().unwrap(),
            mvee.ellipsoid.volume().unwrap(),
        );
        let vol_rel = (vg - vk).abs() / vk;
        assert!(vol_rel <= 1e-4, "case {case}: volume gap {vol_rel:e}");

        // compare shapes scale-free: unit Frobenius norm on the quadric form
        let a_g = general.quadric.shape();
        let a_k = mvee.quadric.shape();
        let shape_dist = a_g
            .scale(1.0 / a_g.frob_norm())
            .frob_dist(&a_k.scale(1.0 / a_k.frob_norm()));
        assert!(shape_dist <= 1e-3, "case {case}: shape gap {shape_dist:e}");

        worst_vol = worst_vol.max(vol_rel);
        worst_shape = worst_shape.max(shape_dist);
    }
    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(120), "took {dt:.2?}");
    println!(
        "ACCEPTANCE volume solver vs mvee: PASS (50 clouds, worst volume gap {worst_vol:.2e}, worst shape gap {worst_shape:.2e}, {dt:.2?})"
    );
}

#[test]
fn multistart_clusters_expose_unique_and_twin_optima() {
    let corners: Vec<DVector<f64>> = [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]
        .iter()
        .map(|c| DVector::from_column_slice(c))
        .collect();
    let corner_spec = ProblemSpec::from_points(&corners);

    let unique = multistart_uniqueness(&corner_spec, &SizeFunction::Volume, 32, 17).unwrap();
    assert_eq!(unique.cluster_count, 1, "round objective over the square");
    assert_eq!(unique.converged_starts, 32);

    let box_poly = HPolytope::new(vec![
        (vec![1.0, 0.0], 2.0),
        (vec![-1.0, 0.0], 2.0),
        (vec![0.0, 1.0], 1.0),
        (vec![0.0, -1.0], 1.0),
    ])
    .unwrap();
    let box_spec = ProblemSpec::from_polytope(&box_poly);
    let inscribed = multistart_uniqueness(&box_spec, &SizeFunction::SqrtSum, 32, 17).unwrap();
    assert_eq!(inscribed.cluster_count, 1, "inscribed ellipse of the box");

    let twin =
        multistart_uniqueness(&corner_spec, &SizeFunction::SquareCounterexample, 32, 17).unwrap();
    assert_eq!(twin.cluster_count, 2, "axis-weighted objective over the square");
    let gap = (twin.clusters[0].objective - twin.clusters[1].objective).abs();
    assert!(gap <= 1e-6, "twin optima should tie, gap {gap:e}");

    println!(
        "ACCEPTANCE multistart clustering: PASS (1 + 1 + 2 clusters, twin gap {gap:.2e})"
    );
}

#[test]
fn midpoint_of_equal_volume_enclosers_is_strictly_smaller() {
    let mut worst_drop = f64::INFINITY;
    for case in 0..200 {
        let mut rng = rng_from_seed(5200 + case as u64);
        let dim = 2 + case % 2;
        let points = random_point_cloud(&mut rng, dim, 12 + case % 20, 1.0);
        let (e0, e1) = equal_volume_enclosing_pair(&mut rng, &points);

        let v0 = e0.volume().unwrap();
        let v1 = e1.volume().unwrap();
        assert!((v0 - v1).abs() <= 1e-9 * v0, "volumes should tie");

        let mid = between_preimage(&e0, &e1, 0.5).unwrap();
        for x in &points {
            assert!(
                mid.membership_slack(x) >= -1e-9,
                "case {case}: midpoint stopped enclosing the cloud"
            );
        }
        let vm = mid.volume().unwrap();
        assert!(
            vm < v0 - 1e-12,
            "case {case}: midpoint volume {vm} did not drop below {v0}"
        );
        worst_drop = worst_drop.min(v0 - vm);
    }
    println!(
        "ACCEPTANCE equal-volume midpoint shrinks: PASS (200 pairs, smallest drop {worst_drop:.2e})"
    );
}

#[test]
fn representation_round_trips_stay_within_tolerance() {
    let mut rng = rng_from_seed(88);
    let mut worst = 0.0_f64;
    for case in 0..1000 {
        let dim = 2 + case % 4;
        let q = random_regular_quadric(&mut rng, dim, 0.12);

        let mut track = |back: extremal_ellipsoids::QuadricEllipsoid| {
            let mut err = q.shape().frob_dist(back.shape()) / q.shape().frob_norm();
            err = err.max((q.center() - back.center()).norm());
            worst = worst.max(err);
            assert!(err <= 1e-8, "case {case}: round trip error {err:e}");
        };
        track(q.to_affine().to_quadric().unwrap());
        track(q.to_homogeneous().unwrap().to_quadric().unwrap());
        track(q.to_dual().unwrap().to_quadric().unwrap());
        track(q.to_homogeneous_dual().unwrap().to_quadric().unwrap());

        let product = q.to_dual().unwrap().q_matrix().to_dense() * q.shape().to_dense();
        for i in 0..dim {
            for j in 0..dim {
                let want = if i == j { 1.0 } else { 0.0 };
                let err = (product[(i, j)] - want).abs();
                worst = worst.max(err);
                assert!(err <= 1e-8, "case {case}: dual inverse off by {err:e}");
            }
        }
    }
    println!(
        "ACCEPTANCE representation round trips: PASS (1000 draws, worst error {worst:.2e})"
    );
}

//! Extremal ellipsoids of convex bodies under general size functions.
//!
//! The crate provides:
//!
//! * four interchangeable ellipsoid representations (quadric form, affine
//!   image/preimage of the unit ball, homogeneous quadric, dual region of
//!   non-cutting hyperplane normals) with validated conversions between them
//!   ([`ellipsoid`]),
//! * a family of size functions acting on semi-axis vectors, including exact
//!   planar circumference via elliptic integrals ([`size`], [`elliptic`]),
//! * randomized convexity/concavity probes for size functions composed with
//!   spectral maps ([`probe`]),
//! * interpolation ("in-betweenness") operators for each representation and
//!   containment checkers for the resulting families ([`between`]),
//! * solvers for minimal circumscribed and maximal inscribed ellipsoids with
//!   a multistart uniqueness report ([`solver`]),
//! * H-polytope support and reproducible random instances used by the test
//!   and experiment harnesses ([`polytope`], [`instances`]).
//!
//! All randomness is driven by explicit seeds; identical inputs produce
//! identical outputs on every run.

pub mod between;
pub mod ellipsoid;
pub mod elliptic;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod polytope;
pub mod probe;
pub mod sample;
pub mod size;
pub mod solver;

pub use between::{
    between_dual, between_homogeneous, between_homogeneous_dual, between_image, between_preimage,
    check_dual_hull_containment, check_dual_pair, check_hull_containment,
    check_intersection_enclosure, default_lambda_grid, DualHullReport, HullContainmentReport,
    InBetweenFamily, IntersectionEnclosureReport,
};
pub use ellipsoid::{
    ellipsoid_in_convex_hull, AffineMap, DualEllipsoid, HomogeneousKind, HomogeneousQuadric,
    MapMode, QuadricEllipsoid, SemiAxes, MAX_DIM,
};
pub use elliptic::{arc_length, arc_length_with, elliptic_e, ModulusConvention};
pub use error::{Error, Result};
pub use linalg::{SymEigen, SymMatrix};
pub use polytope::{ellipsoid_in_polytope, HPolytope};
pub use probe::{convexity_probe, ProbeDomain, ProbeReport, Property};
pub use size::{unit_ball_volume, w_pow, SizeFunction};
pub use solver::{
    khachiyan_mvee, multistart_uniqueness, solve_max_inscribed,
    solve_max_inscribed_fixed_center_dual, solve_min_enclosing, ProblemSpec, SolveResult,
    SolverConfig, UniquenessReport,
};

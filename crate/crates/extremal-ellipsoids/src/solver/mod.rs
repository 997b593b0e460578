//! Solvers for extremal ellipsoids under a general size function: minimal
//! enclosing ellipsoids of point sets, maximal inscribed ellipsoids of
//! H-polytopes (free, fixed-center, and fixed-center dual parametrizations),
//! the classical volume oracle, and a multistart explorer that clusters
//! independent solver runs to report empirical uniqueness evidence.

mod khachiyan;
mod penalty;
mod polish;

pub use khachiyan::khachiyan_mvee;
pub use penalty::PenaltyRound;

use nalgebra::DVector;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ellipsoid::{AffineMap, QuadricEllipsoid, MAX_DIM};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::polytope::HPolytope;
use crate::probe::{convexity_probe, ProbeDomain, Property};
use crate::sample::{gaussian, rng_from_seed, symmetric_with_spectrum};
use crate::size::{unit_ball_volume, SizeFunction};

use penalty::{minimize, PenaltyOutcome, PenaltySchedule};
use polish::polish;

/// Two solver runs whose (shape, center) parameters are closer than this in
/// Frobenius distance are considered the same optimum.
pub const CLUSTER_TOL: f64 = 1e-4;

/// Representative objectives further apart than this (relatively) mean the
/// clusters cannot all be global optima.
pub const SPREAD_TOL: f64 = 1e-6;

/// Eigenvalues of parameter matrices are clamped into this range inside
/// objective evaluations, which keeps the penalized objective bounded on
/// degenerate instances (shrinking or flattening families).
const LAMBDA_FLOOR: f64 = 1e-10;
const LAMBDA_CAP: f64 = 1e8;

// ---------------------------------------------------------------------------
// configuration and result types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Outer penalty rounds (mu grows, sigma shrinks each round).
    pub max_rounds: u32,
    /// Gradient steps per round.
    pub max_inner: u32,
    /// Relative objective settling tolerance between rounds.
    pub objective_tol: f64,
    /// Feasibility tolerance on raw constraint values.
    pub constraint_tol: f64,
    pub penalty_growth: f64,
    pub sigma_shrink: f64,
    pub initial_mu: f64,
    pub initial_sigma: f64,
    pub initial_step: f64,
    pub multistart: u32,
    pub seed: u64,
    /// Probe the required convexity/concavity of f composed with the
    /// parametrization's spectral map and attach a warning when it fails.
    pub probe_gate: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_rounds: 24,
            max_inner: 400,
            objective_tol: 1e-10,
            constraint_tol: 1e-9,
            penalty_growth: 10.0,
            sigma_shrink: 0.5,
            initial_mu: 10.0,
            initial_sigma: 1e-4,
            initial_step: 0.1,
            multistart: 1,
            seed: 0,
            probe_gate: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_rounds == 0 || self.max_inner == 0 {
            return Err(Error::InvalidParameter(
                "iteration limits must be positive".into(),
            ));
        }
        if !(self.objective_tol > 0.0) || !(self.constraint_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "tolerances must be positive".into(),
            ));
        }
        if !(self.penalty_growth > 1.0) {
            return Err(Error::InvalidParameter(
                "penalty growth must exceed 1".into(),
            ));
        }
        if !(self.sigma_shrink > 0.0 && self.sigma_shrink < 1.0) {
            return Err(Error::InvalidParameter(
                "sigma shrink must lie in (0, 1)".into(),
            ));
        }
        if !(self.initial_mu > 0.0) || !(self.initial_sigma > 0.0) || !(self.initial_step > 0.0) {
            return Err(Error::InvalidParameter(
                "penalty schedule parameters must be positive".into(),
            ));
        }
        if self.multistart == 0 {
            return Err(Error::InvalidParameter("multistart must be >= 1".into()));
        }
        Ok(())
    }

    fn schedule(&self) -> PenaltySchedule {
        PenaltySchedule {
            mu0: self.initial_mu,
            mu_growth: self.penalty_growth,
            mu_cap: 1e9,
            sigma0: self.initial_sigma,
            sigma_shrink: self.sigma_shrink,
            sigma_floor: 1e-9,
            rounds: self.max_rounds,
            inner: self.max_inner,
            step0: self.initial_step,
            constraint_tol: self.constraint_tol,
            objective_tol: self.objective_tol,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StartSummary {
    pub start: u32,
    pub objective: f64,
    pub feasibility: f64,
    pub iterations: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveResult {
    /// Map-form view (preimage for enclosing, image for inscribed).
    pub ellipsoid: AffineMap,
    /// Quadric-form view of the same ellipsoid.
    pub quadric: QuadricEllipsoid,
    /// Size-function value at the solution.
    pub objective: f64,
    /// Worst constraint slack at the solution; negative means violated.
    pub feasibility: f64,
    pub iterations: u64,
    pub converged: bool,
    /// Accepted penalized values per outer round (best start only).
    pub rounds: Vec<PenaltyRound>,
    /// Per-start summaries when several starts were run.
    pub starts: Vec<StartSummary>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterInfo {
    pub representative: QuadricEllipsoid,
    pub objective: f64,
    /// Start indices that landed in this cluster.
    pub members: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub cluster_count: usize,
    /// Ordered best objective first.
    pub clusters: Vec<ClusterInfo>,
    pub max_intra_distance: f64,
    /// None when there is a single cluster.
    pub min_inter_distance: Option<f64>,
    /// Relative objective spread across cluster representatives.
    pub objective_spread: f64,
    /// True when the spread exceeds the global-optimum-candidate tolerance.
    pub spread_flagged: bool,
    pub starts: u32,
    pub converged_starts: u32,
    pub warnings: Vec<String>,
}

// ---------------------------------------------------------------------------
// problem specification (JSON interface)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceSpec {
    pub a: Vec<f64>,
    pub b: f64,
}

/// Geometry input for the solvers: either a point cloud (enclosing) or a
/// halfspace list (inscribed), with an optional pinned center.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<HalfspaceSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_center: Option<Vec<f64>>,
}

impl ProblemSpec {
    pub fn from_points(points: &[DVector<f64>]) -> Self {
        Self {
            points: Some(points.iter().map(|x| x.iter().copied().collect()).collect()),
            halfspaces: None,
            fixed_center: None,
        }
    }

    pub fn from_polytope(f: &HPolytope) -> Self {
        Self {
            points: None,
            halfspaces: Some(
                f.rows()
                    .map(|(a, b)| HalfspaceSpec {
                        a: a.iter().copied().collect(),
                        b,
                    })
                    .collect(),
            ),
            fixed_center: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.points, &self.halfspaces) {
            (Some(_), Some(_)) => Err(Error::InvalidParameter(
                "problem gives both points and halfspaces; pick one".into(),
            )),
            (None, None) => Err(Error::InvalidParameter(
                "problem gives neither points nor halfspaces".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn point_vectors(&self) -> Result<Vec<DVector<f64>>> {
        let pts = self
            .points
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("problem has no point set".into()))?;
        if pts.is_empty() {
            return Err(Error::InvalidParameter("empty point set".into()));
        }
        let dim = pts[0].len();
        for p in pts {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: p.len(),
                });
            }
        }
        Ok(pts.iter().map(|p| DVector::from_row_slice(p)).collect())
    }

    pub fn polytope(&self) -> Result<HPolytope> {
        let rows = self
            .halfspaces
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("problem has no halfspace list".into()))?;
        HPolytope::new(rows.iter().map(|h| (h.a.clone(), h.b)).collect())
    }
}

// ---------------------------------------------------------------------------
// packed symmetric parameter block
// ---------------------------------------------------------------------------

fn packed_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// Entry (i, j) of the packed symmetric block at the head of `theta`.
#[inline]
fn sym_entry(theta: &[f64], i: usize, j: usize) -> f64 {
    let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
    theta[hi * (hi + 1) / 2 + lo]
}

fn unpack_sym(dim: usize, theta: &[f64]) -> SymMatrix {
    SymMatrix::from_fn(dim, |i, j| sym_entry(theta, i, j))
}

fn pack_sym(s: &SymMatrix, out: &mut Vec<f64>) {
    for i in 0..s.dim() {
        for j in 0..=i {
            out.push(s.get(i, j));
        }
    }
}

/// Ascending eigenvalues of the packed block, clamped into the working range;
/// None when the eigensolver fails (treated as out-of-domain by callers).
fn clamped_eigenvalues(dim: usize, theta: &[f64]) -> Option<Vec<f64>> {
    match unpack_sym(dim, theta).eigenvalues() {
        Ok(mut l) => {
            for v in &mut l {
                *v = v.clamp(LAMBDA_FLOOR, LAMBDA_CAP);
            }
            Some(l)
        }
        Err(_) => None,
    }
}

/// Projection used after every accepted step: clip the packed block's
/// eigenvalues at `floor` so the iterate stays usable by the constructors.
fn psd_project(dim: usize, floor: f64, theta: &mut [f64]) {
    let s = unpack_sym(dim, theta);
    if let Ok(e) = s.sym_eigen() {
        if e.min() < floor {
            let clipped = e.spectral_map(|l| l.max(floor));
            let mut k = 0;
            for i in 0..dim {
                for j in 0..=i {
                    theta[k] = clipped.get(i, j);
                    k += 1;
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// preflight: boundedness, interior, Chebyshev ball
// ---------------------------------------------------------------------------

fn lp_schedule() -> PenaltySchedule {
    PenaltySchedule {
        rounds: 20,
        inner: 300,
        step0: 0.5,
        ..PenaltySchedule::default()
    }
}

/// Searches the recession cone {y : a_j . y <= 0} intersected with the unit
/// box along all 2d axis objectives. Any direction with a substantial
/// component certifies unboundedness of the polytope.
fn recession_direction(f_poly: &HPolytope) -> Option<Vec<f64>> {
    let d = f_poly.dim();
    for k in 0..d {
        for sign in [1.0, -1.0] {
            let out = minimize(
                |y: &[f64]| -sign * y[k],
                |y: &[f64], v: &mut Vec<f64>| {
                    for (a, _) in f_poly.rows() {
                        v.push(a.iter().zip(y).map(|(ai, yi)| ai * yi).sum::<f64>());
                    }
                    for yi in y {
                        v.push(yi - 1.0);
                        v.push(-yi - 1.0);
                    }
                },
                |_| {},
                vec![0.0; d],
                &lp_schedule(),
            );
            let reach = sign * out.theta[k];
            if reach >= 0.5 && out.worst_violation <= 1e-6 {
                let norm = out.theta.iter().map(|v| v * v).sum::<f64>().sqrt();
                return Some(out.theta.iter().map(|v| v / norm).collect());
            }
        }
    }
    None
}

/// Largest inscribed ball (center, radius) via the penalty method on the
/// linear program max r s.t. a_j . x + r <= b_j. The radius is negative when
/// the polytope has empty interior.
fn chebyshev_ball(f_poly: &HPolytope) -> (DVector<f64>, f64) {
    let d = f_poly.dim();
    let out = minimize(
        |t: &[f64]| -t[d],
        |t: &[f64], v: &mut Vec<f64>| {
            for (a, b) in f_poly.rows() {
                let ax: f64 = a.iter().zip(&t[..d]).map(|(ai, xi)| ai * xi).sum();
                v.push(ax + t[d] - b);
            }
        },
        |_| {},
        vec![0.0; d + 1],
        &lp_schedule(),
    );
    let center = DVector::from_row_slice(&out.theta[..d]);
    (center, -out.objective)
}

/// Bounded-with-interior check shared by the inscribed solvers.
fn preflight_polytope(f_poly: &HPolytope) -> Result<(DVector<f64>, f64)> {
    if f_poly.dim() > MAX_DIM {
        return Err(Error::DimensionOutOfRange(f_poly.dim()));
    }
    if let Some(direction) = recession_direction(f_poly) {
        return Err(Error::Unbounded { direction });
    }
    let (center, radius) = chebyshev_ball(f_poly);
    if radius <= 1e-7 {
        return Err(Error::EmptyInterior { radius });
    }
    Ok((center, radius))
}

fn check_center_interior(f_poly: &HPolytope, m: &DVector<f64>) -> Result<()> {
    for (j, (a, b)) in f_poly.rows().enumerate() {
        let slack = b - a.dot(m);
        if slack <= 0.0 {
            return Err(Error::CenterNotInterior {
                row: j,
                violation: -slack,
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// solve cores
// ---------------------------------------------------------------------------

struct StartRun {
    affine: AffineMap,
    quadric: QuadricEllipsoid,
    objective: f64,
    feasibility: f64,
    iterations: u64,
    converged: bool,
    rounds: Vec<PenaltyRound>,
    warnings: Vec<String>,
}

/// Degeneracy bookkeeping shared by all assemblies: an optimum pinned at the
/// eigenvalue clamp is a diverging/collapsing family, not a solution.
fn degeneracy_warnings(lambdas: &[f64], out_converged: bool) -> (bool, Vec<String>) {
    let mut warnings = Vec::new();
    let mut converged = out_converged;
    if lambdas.iter().any(|l| *l >= 0.99 * LAMBDA_CAP) {
        warnings.push(
            "parameter matrix hit the upper eigenvalue clamp: the instance admits a \
             degenerate shrinking family and the reported ellipsoid is not an optimum"
                .to_string(),
        );
        converged = false;
    }
    if lambdas.iter().any(|l| *l <= 1.01 * LAMBDA_FLOOR) {
        warnings.push(
            "parameter matrix hit the lower eigenvalue clamp: the optimum is flat to \
             working precision"
                .to_string(),
        );
        converged = false;
    }
    (converged, warnings)
}

/// Value the descent engine minimizes for semi-axes `axes`. Volume runs
/// through its logarithm: the optimizer is unchanged under the strictly
/// increasing transform, the slope stays bounded away from the axes, and a
/// finite penalty weight therefore dominates the objective globally. The
/// bare product of d axes would outrun any linear penalty term far from the
/// feasible set.
fn solver_objective(f: &SizeFunction, axes: &[f64]) -> f64 {
    if matches!(f, SizeFunction::Volume) {
        let mut s = unit_ball_volume(axes.len()).ln();
        for a in axes {
            if !(*a > 0.0) {
                return f64::INFINITY;
            }
            s += a.ln();
        }
        s
    } else {
        f.eval(axes).unwrap_or(f64::INFINITY)
    }
}

fn run_enclosing_once(
    points: &[DVector<f64>],
    f: &SizeFunction,
    sched: &PenaltySchedule,
    theta0: Vec<f64>,
) -> Result<StartRun> {
    let d = points[0].len();
    let np = packed_len(d);

    let objective = |theta: &[f64]| -> f64 {
        match clamped_eigenvalues(d, theta) {
            Some(lam) => {
                let axes: Vec<f64> = lam.iter().map(|l| 1.0 / l).collect();
                solver_objective(f, &axes)
            }
            None => f64::INFINITY,
        }
    };
    let violations = |theta: &[f64], out: &mut Vec<f64>| {
        for x in points {
            let mut s2 = 0.0;
            for i in 0..d {
                let mut yi = theta[np + i];
                for j in 0..d {
                    yi += sym_entry(theta, i, j) * x[j];
                }
                s2 += yi * yi;
            }
            out.push(s2.sqrt() - 1.0);
        }
    };
    let project = |theta: &mut [f64]| psd_project(d, LAMBDA_FLOOR, theta);

    let out: PenaltyOutcome = minimize(&objective, &violations, &project, theta0, sched);
    let theta = polish(&objective, &violations, &project, &out.theta, sched.constraint_tol)
        .unwrap_or_else(|| out.theta.clone());

    let p = unpack_sym(d, &theta[..np]);
    let lambdas = p.eigenvalues()?;
    let affine = AffineMap::preimage(p, theta[np..].to_vec())?;
    let quadric = affine.to_quadric()?;
    let axes = affine.semi_axes()?;
    let obj_value = f.eval(axes.values())?;
    let feasibility = points
        .iter()
        .map(|x| affine.membership_slack(x))
        .fold(f64::INFINITY, f64::min);
    let (converged, warnings) = degeneracy_warnings(&lambdas, out.converged);

    Ok(StartRun {
        affine,
        quadric,
        objective: obj_value,
        feasibility,
        iterations: out.iterations,
        converged,
        rounds: out.rounds,
        warnings,
    })
}

fn run_inscribed_once(
    f_poly: &HPolytope,
    f: &SizeFunction,
    fixed: Option<&DVector<f64>>,
    sched: &PenaltySchedule,
    theta0: Vec<f64>,
) -> Result<StartRun> {
    let d = f_poly.dim();
    let np = packed_len(d);

    let objective = |theta: &[f64]| -> f64 {
        match clamped_eigenvalues(d, theta) {
            Some(lam) => {
                let v = solver_objective(f, &lam);
                if v.is_finite() {
                    -v
                } else {
                    f64::INFINITY
                }
            }
            None => f64::INFINITY,
        }
    };
    let violations = |theta: &[f64], out: &mut Vec<f64>| {
        for (a, b) in f_poly.rows() {
            let mut s2 = 0.0;
            for i in 0..d {
                let mut yi = 0.0;
                for j in 0..d {
                    yi += sym_entry(theta, i, j) * a[j];
                }
                s2 += yi * yi;
            }
            let at: f64 = match fixed {
                Some(m) => a.dot(m),
                None => a.iter().zip(&theta[np..]).map(|(ai, ti)| ai * ti).sum(),
            };
            out.push(s2.sqrt() + at - b);
        }
    };
    let project = |theta: &mut [f64]| psd_project(d, 1e-12, theta);

    let mut out: PenaltyOutcome = minimize(&objective, &violations, &project, theta0, sched);
    // the engine minimized -f; report the trace in the maximization sense
    for round in &mut out.rounds {
        for v in &mut round.penalized {
            *v = -*v;
        }
    }
    let theta = polish(&objective, &violations, &project, &out.theta, sched.constraint_tol)
        .unwrap_or_else(|| out.theta.clone());

    let p = unpack_sym(d, &theta[..np]);
    let lambdas = p.eigenvalues()?;
    let t: Vec<f64> = match fixed {
        Some(m) => m.iter().copied().collect(),
        None => theta[np..].to_vec(),
    };
    let affine = AffineMap::image(p, t)?;
    let quadric = affine.to_quadric()?;
    let axes = affine.semi_axes()?;
    let obj_value = f.eval(axes.values())?;
    let feasibility = f_poly
        .ellipsoid_slacks(&affine)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let (converged, warnings) = degeneracy_warnings(&lambdas, out.converged);

    Ok(StartRun {
        affine,
        quadric,
        objective: obj_value,
        feasibility,
        iterations: out.iterations,
        converged,
        rounds: out.rounds,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// initialization and multistart
// ---------------------------------------------------------------------------

/// Bounding-ball start for the enclosing solver: box center, covering radius
/// inflated by 10%.
fn enclosing_base(points: &[DVector<f64>]) -> (SymMatrix, DVector<f64>, f64) {
    let d = points[0].len();
    let mut lo = points[0].clone();
    let mut hi = points[0].clone();
    for x in points {
        for i in 0..d {
            lo[i] = lo[i].min(x[i]);
            hi[i] = hi[i].max(x[i]);
        }
    }
    let c = (&lo + &hi) * 0.5;
    let r = points
        .iter()
        .map(|x| (x - &c).norm())
        .fold(0.0_f64, f64::max)
        .max(1e-6)
        * 1.1;
    (SymMatrix::identity(d).scale(1.0 / r), c, r)
}

/// Log-normal axis rescaling conjugated by a random rotation, applied to the
/// base spectrum. Every multistart start is perturbed (including the first)
/// so that a symmetric initial point cannot pin a run onto a symmetric ridge
/// of a non-convex objective.
fn perturbed_spectrum(rng: &mut ChaCha8Rng, base: &SymMatrix) -> Result<SymMatrix> {
    let eig = base.sym_eigen()?;
    let spectrum: Vec<f64> = eig
        .values
        .iter()
        .map(|l| l.max(LAMBDA_FLOOR) * (0.8 * gaussian(rng)).exp())
        .collect();
    Ok(symmetric_with_spectrum(rng, &spectrum))
}

fn enclosing_start(
    rng: &mut ChaCha8Rng,
    base_p: &SymMatrix,
    center: &DVector<f64>,
    radius: f64,
    perturb: bool,
) -> Result<Vec<f64>> {
    let d = base_p.dim();
    let (p, c) = if perturb {
        let p = perturbed_spectrum(rng, base_p)?;
        let c = DVector::from_fn(d, |i, _| center[i] + 0.1 * radius * gaussian(rng));
        (p, c)
    } else {
        (base_p.clone(), center.clone())
    };
    let mut theta = Vec::with_capacity(packed_len(d) + d);
    pack_sym(&p, &mut theta);
    let t = -p.mul_vec(&c);
    theta.extend(t.iter());
    Ok(theta)
}

fn inscribed_start(
    rng: &mut ChaCha8Rng,
    center: &DVector<f64>,
    radius: f64,
    fixed: Option<&DVector<f64>>,
    perturb: bool,
) -> Result<Vec<f64>> {
    let d = center.len();
    let base = SymMatrix::identity(d).scale(0.9 * radius);
    let p = if perturb {
        perturbed_spectrum(rng, &base)?
    } else {
        base
    };
    let mut theta = Vec::with_capacity(packed_len(d) + d);
    pack_sym(&p, &mut theta);
    if fixed.is_none() {
        for i in 0..d {
            let jitter = if perturb { 0.3 * radius * gaussian(rng) } else { 0.0 };
            theta.push(center[i] + jitter);
        }
    }
    Ok(theta)
}

enum Task<'a> {
    Enclose {
        points: &'a [DVector<f64>],
    },
    Inscribe {
        poly: &'a HPolytope,
        fixed: Option<DVector<f64>>,
        chebyshev: (DVector<f64>, f64),
    },
}

impl Task<'_> {
    fn minimizes(&self) -> bool {
        matches!(self, Task::Enclose { .. })
    }

    fn run_once(
        &self,
        f: &SizeFunction,
        sched: &PenaltySchedule,
        theta0: Vec<f64>,
    ) -> Result<StartRun> {
        match self {
            Task::Enclose { points } => run_enclosing_once(points, f, sched, theta0),
            Task::Inscribe { poly, fixed, .. } => {
                run_inscribed_once(poly, f, fixed.as_ref(), sched, theta0)
            }
        }
    }

    fn start_theta(&self, rng: &mut ChaCha8Rng, perturb: bool) -> Result<Vec<f64>> {
        match self {
            Task::Enclose { points } => {
                let (p0, c0, r0) = enclosing_base(points);
                enclosing_start(rng, &p0, &c0, r0, perturb)
            }
            Task::Inscribe {
                fixed, chebyshev, ..
            } => {
                let center = match fixed {
                    Some(m) => m.clone(),
                    None => chebyshev.0.clone(),
                };
                inscribed_start(rng, &center, chebyshev.1, fixed.as_ref(), perturb)
            }
        }
    }
}

fn probe_warning(
    f: &SizeFunction,
    p: f64,
    property: Property,
    dim: usize,
    seed: u64,
) -> Vec<String> {
    let label = match property {
        Property::Convex => "convexity",
        Property::Concave => "concavity",
    };
    match convexity_probe(f, p, property, ProbeDomain::Positive, dim, 2000, seed) {
        Ok(rep) if !rep.verdict_holds() => vec![format!(
            "{} of {} composed with the exponent {} map failed a randomized probe \
             ({} of {} trials); the optimum may not be unique, multistart evidence applies",
            label,
            f.name(),
            p,
            rep.violations,
            rep.trials
        )],
        Ok(_) => Vec::new(),
        Err(e) => vec![format!("{label} probe skipped: {e}")],
    }
}

/// Runs `n_starts` solves (all perturbed when n_starts > 1) and returns the
/// per-start runs plus shared warnings.
fn run_starts(
    task: &Task,
    f: &SizeFunction,
    cfg: &SolverConfig,
    n_starts: u32,
    probe: (f64, Property),
    dim: usize,
) -> Result<(Vec<StartRun>, Vec<String>)> {
    cfg.validate()?;
    if let Some(required) = f.declared_dim() {
        if required != dim {
            return Err(Error::DimensionMismatch {
                expected: required,
                actual: dim,
            });
        }
    }
    let mut warnings = Vec::new();
    if cfg.probe_gate {
        warnings.extend(probe_warning(f, probe.0, probe.1, dim, cfg.seed ^ 0x9E37));
    }

    let sched = cfg.schedule();
    let mut rng = rng_from_seed(cfg.seed);
    let mut runs = Vec::with_capacity(n_starts as usize);
    let mut first_err: Option<Error> = None;
    for s in 0..n_starts {
        let perturb = n_starts > 1;
        let attempt = task
            .start_theta(&mut rng, perturb)
            .and_then(|theta0| task.run_once(f, &sched, theta0));
        match attempt {
            Ok(run) => runs.push(run),
            Err(e) => {
                warnings.push(format!("start {s} failed: {e}"));
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    if runs.is_empty() {
        return Err(first_err.expect("no starts were attempted"));
    }
    Ok((runs, warnings))
}

fn best_run_index(runs: &[StartRun], minimizes: bool) -> usize {
    let better = |a: f64, b: f64| if minimizes { a < b } else { a > b };
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        let b = &runs[best];
        // converged runs outrank non-converged ones regardless of value
        let key_new = (r.converged, r.objective);
        let key_old = (b.converged, b.objective);
        if (key_new.0 && !key_old.0)
            || (key_new.0 == key_old.0 && better(key_new.1, key_old.1))
        {
            best = i;
        }
    }
    best
}

fn assemble_result(
    mut runs: Vec<StartRun>,
    minimizes: bool,
    mut warnings: Vec<String>,
) -> SolveResult {
    let best = best_run_index(&runs, minimizes);
    let starts: Vec<StartSummary> = runs
        .iter()
        .enumerate()
        .map(|(i, r)| StartSummary {
            start: i as u32,
            objective: r.objective,
            feasibility: r.feasibility,
            iterations: r.iterations,
            converged: r.converged,
        })
        .collect();
    for r in &runs {
        for w in &r.warnings {
            if !warnings.contains(w) {
                warnings.push(w.clone());
            }
        }
    }
    let win = runs.swap_remove(best);
    SolveResult {
        ellipsoid: win.affine,
        quadric: win.quadric,
        objective: win.objective,
        feasibility: win.feasibility,
        iterations: win.iterations,
        converged: win.converged,
        rounds: win.rounds,
        starts: if starts.len() > 1 { starts } else { Vec::new() },
        warnings,
    }
}

// ---------------------------------------------------------------------------
// public solves
// ---------------------------------------------------------------------------

/// f-minimal ellipsoid enclosing a point set, by the smoothed exact-penalty
/// method over the preimage parameters (P, t) with constraints
/// ||P x_i + t|| <= 1.
pub fn solve_min_enclosing(
    points: &[DVector<f64>],
    f: &SizeFunction,
    cfg: &SolverConfig,
) -> Result<SolveResult> {
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
    let task = Task::Enclose { points };
    let (runs, mut warnings) =
        run_starts(&task, f, cfg, cfg.multistart, (-1.0, Property::Convex), dim)?;
    let mut result = assemble_result(runs, true, warnings.drain(..).collect());
    // a rank-deficient cloud admits a family flattening toward zero size
    match khachiyan::affine_rank(points) {
        Ok(rank) if rank < dim => {
            result.converged = false;
            result.warnings.push(format!(
                "points span an affine subspace of rank {rank} < {dim}; the f-minimal \
                 family shrinks toward zero thickness and no optimum is attained"
            ));
        }
        _ => {}
    }
    Ok(result)
}

/// f-maximal ellipsoid inscribed in a bounded H-polytope, by the smoothed
/// exact-penalty method over the image parameters (P, t) with constraints
/// ||P a_j|| + a_j . t <= b_j. `fixed_center` pins t.
pub fn solve_max_inscribed(
    f_poly: &HPolytope,
    f: &SizeFunction,
    cfg: &SolverConfig,
    fixed_center: Option<&[f64]>,
) -> Result<SolveResult> {
    let dim = f_poly.dim();
    let chebyshev = preflight_polytope(f_poly)?;
    let fixed = match fixed_center {
        Some(m) => {
            if m.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: m.len(),
                });
            }
            let mv = DVector::from_row_slice(m);
            check_center_interior(f_poly, &mv)?;
            Some(mv)
        }
        None => None,
    };
    let task = Task::Inscribe {
        poly: f_poly,
        fixed,
        chebyshev,
    };
    let (runs, warnings) = run_starts(&task, f, cfg, cfg.multistart, (1.0, Property::Concave), dim)?;
    Ok(assemble_result(runs, false, warnings))
}

/// f-maximal inscribed ellipsoid with pinned center over the centered dual
/// block Q (the ellipsoid is {x : (x-m)' Q^{-1} (x-m) <= 1}): the polytope
/// constraints a_j' Q a_j <= (b_j - a_j . m)^2 are linear in Q and the
/// objective acts on the square roots of Q's eigenvalues.
pub fn solve_max_inscribed_fixed_center_dual(
    f_poly: &HPolytope,
    m: &[f64],
    f: &SizeFunction,
) -> Result<SolveResult> {
    let dim = f_poly.dim();
    if m.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: m.len(),
        });
    }
    if let Some(required) = f.declared_dim() {
        if required != dim {
            return Err(Error::DimensionMismatch {
                expected: required,
                actual: dim,
            });
        }
    }
    let (_, _) = preflight_polytope(f_poly)?;
    let center = DVector::from_row_slice(m);
    check_center_interior(f_poly, &center)?;

    let np = packed_len(dim);
    let rhs: Vec<f64> = f_poly
        .rows()
        .map(|(a, b)| {
            let s = b - a.dot(&center);
            s * s
        })
        .collect();
    let r_center = f_poly.interior_slack(&center);

    let objective = |theta: &[f64]| -> f64 {
        match clamped_eigenvalues(dim, theta) {
            Some(lam) => {
                let axes: Vec<f64> = lam.iter().map(|l| l.sqrt()).collect();
                let v = solver_objective(f, &axes);
                if v.is_finite() {
                    -v
                } else {
                    f64::INFINITY
                }
            }
            None => f64::INFINITY,
        }
    };
    let violations = |theta: &[f64], out: &mut Vec<f64>| {
        for ((a, _), r) in f_poly.rows().zip(&rhs) {
            let mut q = 0.0;
            for i in 0..dim {
                let mut yi = 0.0;
                for j in 0..dim {
                    yi += sym_entry(theta, i, j) * a[j];
                }
                q += yi * a[i];
            }
            out.push(q - r);
        }
    };
    let project = |theta: &mut [f64]| psd_project(dim, LAMBDA_FLOOR, theta);

    let q0 = SymMatrix::identity(dim).scale((0.9 * r_center).powi(2));
    let mut theta0 = Vec::with_capacity(np);
    pack_sym(&q0, &mut theta0);

    let sched = SolverConfig::default().schedule();
    let mut out = minimize(&objective, &violations, &project, theta0, &sched);
    // the engine minimized -f; report the trace in the maximization sense
    for round in &mut out.rounds {
        for v in &mut round.penalized {
            *v = -*v;
        }
    }
    let theta = polish(&objective, &violations, &project, &out.theta, sched.constraint_tol)
        .unwrap_or_else(|| out.theta.clone());

    let q = unpack_sym(dim, &theta);
    let lambdas = q.eigenvalues()?;
    let eig = q.sym_eigen()?;
    let p = eig.spectral_map(|l| l.max(LAMBDA_FLOOR).sqrt());
    let affine = AffineMap::image(p, m.to_vec())?;
    let quadric = affine.to_quadric()?;
    let axes = affine.semi_axes()?;
    let obj_value = f.eval(axes.values())?;
    let feasibility = {
        let mut buf = Vec::new();
        violations(&theta, &mut buf);
        -buf.into_iter().fold(f64::NEG_INFINITY, f64::max)
    };
    let (converged, mut warnings) = degeneracy_warnings(&lambdas, out.converged);
    warnings.extend(probe_warning(
        f,
        0.5,
        Property::Concave,
        dim,
        0x9E37 ^ 0x5EED,
    ));

    Ok(SolveResult {
        ellipsoid: affine,
        quadric,
        objective: obj_value,
        feasibility,
        iterations: out.iterations,
        converged,
        rounds: out.rounds,
        starts: Vec::new(),
        warnings,
    })
}

// ---------------------------------------------------------------------------
// multistart uniqueness
// ---------------------------------------------------------------------------

/// Frobenius distance on the stacked quadric parameters (shape, center).
pub fn quadric_distance(a: &QuadricEllipsoid, b: &QuadricEllipsoid) -> f64 {
    let ds = a.shape().frob_dist(b.shape());
    let dm = (a.center() - b.center()).norm();
    ds.hypot(dm)
}

/// Clusters independent solver runs by parameter distance and reports whether
/// they agree on one optimum. Non-converged runs are excluded from clusters.
pub fn multistart_uniqueness(
    spec: &ProblemSpec,
    f: &SizeFunction,
    n_starts: u32,
    seed: u64,
) -> Result<UniquenessReport> {
    if n_starts < 8 {
        return Err(Error::InvalidParameter(format!(
            "multistart exploration needs at least 8 starts, got {n_starts}"
        )));
    }
    spec.validate()?;
    let cfg = SolverConfig {
        multistart: n_starts,
        seed,
        ..SolverConfig::default()
    };

    let points;
    let poly;
    let (task, dim, probe): (Task, usize, (f64, Property)) = if spec.points.is_some() {
        points = spec.point_vectors()?;
        let dim = points[0].len();
        (Task::Enclose { points: &points }, dim, (-1.0, Property::Convex))
    } else {
        poly = spec.polytope()?;
        let chebyshev = preflight_polytope(&poly)?;
        let fixed = match &spec.fixed_center {
            Some(m) => {
                let mv = DVector::from_row_slice(m);
                check_center_interior(&poly, &mv)?;
                Some(mv)
            }
            None => None,
        };
        let dim = poly.dim();
        (
            Task::Inscribe {
                poly: &poly,
                fixed,
                chebyshev,
            },
            dim,
            (1.0, Property::Concave),
        )
    };

    let minimizes = task.minimizes();
    let (runs, mut warnings) = run_starts(&task, f, &cfg, n_starts, probe, dim)?;

    let converged: Vec<(u32, &StartRun)> = runs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.converged)
        .map(|(i, r)| (i as u32, r))
        .collect();
    if converged.is_empty() {
        return Err(Error::Domain(
            "no start converged; no clustering evidence available".into(),
        ));
    }
    if converged.len() < runs.len() {
        warnings.push(format!(
            "{} of {} starts did not converge and were excluded from clustering",
            runs.len() - converged.len(),
            runs.len()
        ));
    }

    // single-linkage clustering at the parameter-distance threshold
    let k = converged.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..k {
        for j in (i + 1)..k {
            if quadric_distance(&converged[i].1.quadric, &converged[j].1.quadric) <= CLUSTER_TOL {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; k];
    for i in 0..k {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }

    let better = |a: f64, b: f64| if minimizes { a < b } else { a > b };
    let mut clusters: Vec<ClusterInfo> = groups
        .iter()
        .map(|g| {
            let mut rep = g[0];
            for &i in g {
                if better(converged[i].1.objective, converged[rep].1.objective) {
                    rep = i;
                }
            }
            ClusterInfo {
                representative: converged[rep].1.quadric.clone(),
                objective: converged[rep].1.objective,
                members: g.iter().map(|&i| converged[i].0).collect(),
            }
        })
        .collect();
    clusters.sort_by(|a, b| {
        if minimizes {
            a.objective.partial_cmp(&b.objective).unwrap()
        } else {
            b.objective.partial_cmp(&a.objective).unwrap()
        }
    });

    let mut max_intra: f64 = 0.0;
    for g in &groups {
        for (ii, &i) in g.iter().enumerate() {
            for &j in &g[ii + 1..] {
                max_intra = max_intra
                    .max(quadric_distance(&converged[i].1.quadric, &converged[j].1.quadric));
            }
        }
    }
    let mut min_inter: Option<f64> = None;
    for (gi, g) in groups.iter().enumerate() {
        for h in &groups[gi + 1..] {
            for &i in g {
                for &j in h {
                    let dist = quadric_distance(&converged[i].1.quadric, &converged[j].1.quadric);
                    min_inter = Some(match min_inter {
                        Some(cur) => cur.min(dist),
                        None => dist,
                    });
                }
            }
        }
    }

    let obj_best = clusters[0].objective;
    let obj_worst = clusters[clusters.len() - 1].objective;
    let objective_spread = (obj_best - obj_worst).abs() / obj_best.abs().max(1.0);
    let spread_flagged = objective_spread > SPREAD_TOL;

    Ok(UniquenessReport {
        cluster_count: clusters.len(),
        clusters,
        max_intra_distance: max_intra,
        min_inter_distance: min_inter,
        objective_spread,
        spread_flagged,
        starts: n_starts,
        converged_starts: k as u32,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::random_point_cloud;

    fn square_corners() -> Vec<DVector<f64>> {
        [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]]
            .iter()
            .map(|r| DVector::from_row_slice(r))
            .collect()
    }

    #[test]
    fn enclosing_square_with_volume_is_circle_radius_sqrt2() {
        let f = SizeFunction::Volume;
        let r = solve_min_enclosing(&square_corners(), &f, &SolverConfig::default()).unwrap();
        assert!(r.converged, "warnings: {:?}", r.warnings);
        assert!(r.feasibility >= -1e-9);
        let expect = SymMatrix::from_diag(&[0.5, 0.5]);
        assert!(
            r.quadric.shape().frob_dist(&expect) < 1e-5,
            "shape {:?}",
            r.quadric.shape()
        );
        assert!(r.quadric.center().norm() < 1e-5);
        assert!((r.objective - 2.0 * std::f64::consts::PI).abs() < 1e-5);
        // probe gate: volume composed with the reciprocal map is convex
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
    }

    #[test]
    fn enclosing_matches_khachiyan_on_seeded_cloud() {
        let mut rng = rng_from_seed(77);
        let points = random_point_cloud(&mut rng, 3, 60, 1.5);
        let f = SizeFunction::Volume;
        let general = solve_min_enclosing(&points, &f, &SolverConfig::default()).unwrap();
        let oracle = khachiyan_mvee(&points, 1e-6).unwrap();
        let rel = (general.objective - oracle.objective).abs() / oracle.objective;
        assert!(rel <= 1e-4, "volume mismatch {rel}");
        let scale = oracle.quadric.shape().frob_norm();
        let dist = general.quadric.shape().frob_dist(oracle.quadric.shape()) / scale;
        assert!(dist <= 1e-3, "matrix mismatch {dist}");
    }

    #[test]
    fn enclosing_penalized_trace_is_monotone() {
        let f = SizeFunction::Volume;
        let r = solve_min_enclosing(&square_corners(), &f, &SolverConfig::default()).unwrap();
        assert!(!r.rounds.is_empty());
        for round in &r.rounds {
            for w in round.penalized.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "round not monotone");
            }
        }
    }

    #[test]
    fn degenerate_duplicated_point_reports_non_convergence() {
        let points = vec![DVector::from_row_slice(&[0.3, -0.2]); 5];
        let f = SizeFunction::Volume;
        let r = solve_min_enclosing(&points, &f, &SolverConfig::default()).unwrap();
        assert!(!r.converged);
        assert!(r.warnings.iter().any(|w| w.contains("shrinks")));
    }

    #[test]
    fn inscribed_box_with_volume_is_unit_disc() {
        let f_poly = HPolytope::axis_box(2, 1.0);
        let f = SizeFunction::Volume;
        let r = solve_max_inscribed(&f_poly, &f, &SolverConfig::default(), None).unwrap();
        assert!(r.converged, "warnings: {:?}", r.warnings);
        assert!(r.feasibility >= -1e-9);
        assert!(r.quadric.shape().frob_dist(&SymMatrix::identity(2)) < 1e-4);
        assert!(r.quadric.center().norm() < 1e-5);
        assert!((r.objective - std::f64::consts::PI).abs() < 1e-4);
    }

    #[test]
    fn inscribed_triangle_with_volume_is_incircle() {
        let f_poly = HPolytope::equilateral_triangle();
        let f = SizeFunction::Volume;
        let r = solve_max_inscribed(&f_poly, &f, &SolverConfig::default(), None).unwrap();
        assert!(r.converged);
        let r_in = 3.0_f64.sqrt() / 6.0;
        let c = r.quadric.center();
        assert!((c[0] - 0.5).abs() < 1e-4, "center {c:?}");
        assert!((c[1] - r_in).abs() < 1e-4, "center {c:?}");
        let axes = r.quadric.semi_axes().unwrap();
        assert!((axes.min() - r_in).abs() < 1e-4);
        assert!((axes.max() - r_in).abs() < 1e-4);
    }

    #[test]
    fn fixed_center_dual_on_centered_box_is_unit_disc() {
        let f_poly = HPolytope::axis_box(2, 1.0);
        let f = SizeFunction::SqrtSum;
        let r = solve_max_inscribed_fixed_center_dual(&f_poly, &[0.0, 0.0], &f).unwrap();
        assert!(r.converged);
        assert!(r.feasibility >= -1e-9);
        assert!(r.quadric.shape().frob_dist(&SymMatrix::identity(2)) < 1e-5);
        assert!((r.objective - 2.0).abs() < 1e-5);
    }

    #[test]
    fn fixed_center_dual_agrees_with_affine_parametrization() {
        let f_poly = HPolytope::axis_box(2, 1.0);
        let f = SizeFunction::SqrtSum;
        let m = [0.5, 0.0];
        let dual = solve_max_inscribed_fixed_center_dual(&f_poly, &m, &f).unwrap();
        let affine =
            solve_max_inscribed(&f_poly, &f, &SolverConfig::default(), Some(&m)).unwrap();
        // constraint structure forces the axis-aligned optimum diag(1/2, 1)
        let expect = SymMatrix::from_diag(&[4.0, 1.0]);
        assert!(dual.quadric.shape().frob_dist(&expect) < 1e-4);
        let dist = quadric_distance(&dual.quadric, &affine.quadric);
        assert!(dist <= 1e-4, "parametrizations disagree by {dist}");
        assert!((dual.objective - affine.objective).abs() <= 1e-6);
        assert!((dual.objective - (0.5_f64.sqrt() + 1.0)).abs() < 1e-5);
    }

    #[test]
    fn dual_solution_satisfies_every_row_constraint() {
        let f_poly = HPolytope::equilateral_triangle();
        let f = SizeFunction::Volume;
        let m = [0.5, 0.2];
        let r = solve_max_inscribed_fixed_center_dual(&f_poly, &m, &f).unwrap();
        let q = r
            .quadric
            .shape()
            .sym_eigen()
            .unwrap()
            .spectral_map(|l| 1.0 / l);
        let center = DVector::from_row_slice(&m);
        for (a, b) in f_poly.rows() {
            let rhs = (b - a.dot(&center)).powi(2);
            assert!(q.quad_form(a) <= rhs + 1e-9);
        }
    }

    #[test]
    fn unbounded_polytope_is_rejected_with_direction() {
        let slab = HPolytope::new(vec![
            (vec![1.0, 0.0], 1.0),
            (vec![-1.0, 0.0], 1.0),
        ])
        .unwrap();
        match solve_max_inscribed(&slab, &SizeFunction::Volume, &SolverConfig::default(), None) {
            Err(Error::Unbounded { direction }) => {
                assert!(direction[0].abs() < 1e-3, "direction {direction:?}");
                assert!(direction[1].abs() > 0.99);
            }
            other => panic!("expected unbounded error, got {other:?}"),
        }
    }

    #[test]
    fn empty_polytope_is_rejected() {
        let empty = HPolytope::new(vec![
            (vec![1.0, 0.0], -1.0),
            (vec![-1.0, 0.0], -1.0),
            (vec![0.0, 1.0], 1.0),
            (vec![0.0, -1.0], 1.0),
        ])
        .unwrap();
        assert!(matches!(
            solve_max_inscribed(&empty, &SizeFunction::Volume, &SolverConfig::default(), None),
            Err(Error::EmptyInterior { .. })
        ));
    }

    #[test]
    fn exterior_fixed_center_is_rejected_with_row() {
        let f_poly = HPolytope::axis_box(2, 1.0);
        match solve_max_inscribed_fixed_center_dual(&f_poly, &[2.0, 0.0], &SizeFunction::Volume) {
            Err(Error::CenterNotInterior { row, violation }) => {
                assert_eq!(row, 0);
                assert!((violation - 1.0).abs() < 1e-12);
            }
            other => panic!("expected center error, got {other:?}"),
        }
    }

    #[test]
    fn probe_gate_warns_on_the_non_convex_size_function() {
        let f = SizeFunction::SquareCounterexample;
        let r = solve_min_enclosing(&square_corners(), &f, &SolverConfig::default()).unwrap();
        assert!(
            r.warnings.iter().any(|w| w.contains("randomized probe")),
            "{:?}",
            r.warnings
        );
    }

    #[test]
    fn multistart_volume_on_square_gives_one_cluster() {
        let spec = ProblemSpec::from_points(&square_corners());
        let rep = multistart_uniqueness(&spec, &SizeFunction::Volume, 8, 3).unwrap();
        assert_eq!(rep.cluster_count, 1, "clusters: {:?}", rep.clusters.len());
        assert!(rep.max_intra_distance <= CLUSTER_TOL);
        assert!(!rep.spread_flagged);
        let rep_q = &rep.clusters[0].representative;
        assert!(rep_q.shape().frob_dist(&SymMatrix::from_diag(&[0.5, 0.5])) < 1e-4);
    }

    #[test]
    fn multistart_counterexample_on_square_gives_two_mirror_clusters() {
        let spec = ProblemSpec::from_points(&square_corners());
        let rep =
            multistart_uniqueness(&spec, &SizeFunction::SquareCounterexample, 12, 3).unwrap();
        assert_eq!(rep.cluster_count, 2, "report: {rep:?}");
        for c in &rep.clusters {
            assert!((c.objective - 19.9248).abs() < 1e-3, "obj {}", c.objective);
        }
        assert!(!rep.spread_flagged, "spread {}", rep.objective_spread);
        // the two representatives are x<->y swaps of each other
        let a = rep.clusters[0].representative.shape();
        let b = rep.clusters[1].representative.shape();
        assert!((a.get(0, 0) - b.get(1, 1)).abs() < 1e-4);
        assert!((a.get(1, 1) - b.get(0, 0)).abs() < 1e-4);
        assert!(rep.min_inter_distance.unwrap() > 0.1);
    }

    #[test]
    fn multistart_inscribed_box_sqrt_sum_gives_one_cluster() {
        let spec = ProblemSpec::from_polytope(&HPolytope::axis_box(2, 1.0));
        let rep = multistart_uniqueness(&spec, &SizeFunction::SqrtSum, 8, 9).unwrap();
        assert_eq!(rep.cluster_count, 1);
        let q = &rep.clusters[0].representative;
        assert!(q.shape().frob_dist(&SymMatrix::identity(2)) < 1e-4);
    }

    #[test]
    fn multistart_requires_eight_starts() {
        let spec = ProblemSpec::from_points(&square_corners());
        assert!(matches!(
            multistart_uniqueness(&spec, &SizeFunction::Volume, 7, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn multistart_is_deterministic_per_seed() {
        let spec = ProblemSpec::from_points(&square_corners());
        let a = multistart_uniqueness(&spec, &SizeFunction::Volume, 8, 42).unwrap();
        let b = multistart_uniqueness(&spec, &SizeFunction::Volume, 8, 42).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn problem_spec_json_contract() {
        let json = r#"{"points": [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]}"#;
        let spec: ProblemSpec = serde_json::from_str(json).unwrap();
        spec.validate().unwrap();
        assert_eq!(spec.point_vectors().unwrap().len(), 3);

        let json = r#"{"halfspaces": [{"a": [1.0, 0.0], "b": 1.0}], "fixed_center": [0.0, 0.0]}"#;
        let spec: ProblemSpec = serde_json::from_str(json).unwrap();
        spec.validate().unwrap();
        assert_eq!(spec.polytope().unwrap().len(), 1);

        let both: ProblemSpec = serde_json::from_str(
            r#"{"points": [[0.0]], "halfspaces": [{"a": [1.0], "b": 1.0}]}"#,
        )
        .unwrap();
        assert!(both.validate().is_err());
        assert!(ProblemSpec::default().validate().is_err());

        assert!(serde_json::from_str::<ProblemSpec>(r#"{"point": []}"#).is_err());
    }

    #[test]
    fn solver_config_validation() {
        let mut cfg = SolverConfig::default();
        cfg.multistart = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = SolverConfig::default();
        cfg.constraint_tol = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SolverConfig::default();
        cfg.sigma_shrink = 1.0;
        assert!(cfg.validate().is_err());
        assert!(SolverConfig::default().validate().is_ok());
    }
}

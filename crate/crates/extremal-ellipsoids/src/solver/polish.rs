//! Smooth active-set refinement after the penalty loop.
//!
//! The penalty engine is first order, so near an optimum its progress per
//! accepted step scales with the squared distance and it settles a stall
//! width of roughly sqrt(tolerance) away in parameter space. The objective
//! error at that point is tiny, the parameter error is not. This pass
//! removes the stall width: it reads off the near-active constraints at the
//! incoming point and runs a quasi-Newton iteration on the KKT system of the
//! smooth equality-constrained problem, which has none of the mu/sigma
//! stiffness of the penalized landscape.
//!
//! The refined point is used only when it verifiably improves on the input:
//! every constraint within tolerance, the objective value not worse, and the
//! multipliers of the final active set non-negative. Anything else (wrong
//! active set, a kink inside the finite-difference stencil, a singular KKT
//! system) falls back to the penalty result unchanged.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};

/// Active-set widths tried in order; constraint values are O(1) scaled in
/// every solver parametrization, so these are absolute.
const ACTIVE_TOLS: [f64; 3] = [1e-6, 1e-4, 1e-2];
const MAX_NEWTON: usize = 30;
const MAX_PRUNE: usize = 6;
const GRAD_H: f64 = 1e-6;
const HESS_H: f64 = 1e-4;

fn eval_violations<V: Fn(&[f64], &mut Vec<f64>)>(violations: &V, theta: &[f64]) -> Vec<f64> {
    let mut v = Vec::new();
    violations(theta, &mut v);
    v
}

/// Central finite-difference gradient; one-sided next to domain walls where
/// the objective turns non-finite. Returns None when both sides are walls.
fn fd_gradient<O: Fn(&[f64]) -> f64>(obj: &O, theta: &mut [f64], f0: f64) -> Option<Vec<f64>> {
    let n = theta.len();
    let mut g = vec![0.0; n];
    for k in 0..n {
        let h = GRAD_H * (1.0 + theta[k].abs());
        let saved = theta[k];
        theta[k] = saved + h;
        let fp = obj(theta);
        theta[k] = saved - h;
        let fm = obj(theta);
        theta[k] = saved;
        g[k] = match (fp.is_finite(), fm.is_finite()) {
            (true, true) => (fp - fm) / (2.0 * h),
            (true, false) => (fp - f0) / h,
            (false, true) => (f0 - fm) / h,
            (false, false) => return None,
        };
    }
    Some(g)
}

/// Rows are the finite-difference gradients of the active constraint values.
fn fd_jacobian<V: Fn(&[f64], &mut Vec<f64>)>(
    violations: &V,
    theta: &mut [f64],
    active: &[usize],
) -> Vec<Vec<f64>> {
    let n = theta.len();
    let mut rows = vec![vec![0.0; n]; active.len()];
    let mut vp = Vec::new();
    let mut vm = Vec::new();
    for k in 0..n {
        let h = GRAD_H * (1.0 + theta[k].abs());
        let saved = theta[k];
        theta[k] = saved + h;
        vp.clear();
        violations(theta, &mut vp);
        theta[k] = saved - h;
        vm.clear();
        violations(theta, &mut vm);
        theta[k] = saved;
        for (row, &j) in rows.iter_mut().zip(active) {
            let d = (vp[j] - vm[j]) / (2.0 * h);
            row[k] = if d.is_finite() { d } else { 0.0 };
        }
    }
    rows
}

/// Second-difference Hessian of the Lagrangian obj + lambda . v_active,
/// evaluated once per attempt and kept frozen across the Newton steps.
fn fd_hessian<O, V>(
    obj: &O,
    violations: &V,
    theta: &mut [f64],
    active: &[usize],
    lambda: &[f64],
) -> Option<DMatrix<f64>>
where
    O: Fn(&[f64]) -> f64,
    V: Fn(&[f64], &mut Vec<f64>),
{
    let n = theta.len();
    let mut buf = Vec::new();
    let mut lagr = |theta: &mut [f64]| -> f64 {
        let o = obj(theta);
        if !o.is_finite() {
            return f64::INFINITY;
        }
        buf.clear();
        violations(theta, &mut buf);
        o + active
            .iter()
            .zip(lambda)
            .map(|(&j, l)| l * buf[j])
            .sum::<f64>()
    };
    let l0 = lagr(theta);
    if !l0.is_finite() {
        return None;
    }
    let h: Vec<f64> = (0..n).map(|k| HESS_H * (1.0 + theta[k].abs())).collect();
    let mut at = |dk: usize, sk: f64, dl: usize, sl: f64, lagr: &mut dyn FnMut(&mut [f64]) -> f64| {
        let (tk, tl) = (theta[dk], theta[dl]);
        theta[dk] += sk * h[dk];
        theta[dl] += sl * h[dl];
        let v = lagr(theta);
        theta[dk] = tk;
        theta[dl] = tl;
        v
    };
    let mut hess = DMatrix::zeros(n, n);
    for k in 0..n {
        let fp = at(k, 1.0, k, 0.0, &mut lagr);
        let fm = at(k, -1.0, k, 0.0, &mut lagr);
        if !fp.is_finite() || !fm.is_finite() {
            return None;
        }
        hess[(k, k)] = (fp - 2.0 * l0 + fm) / (h[k] * h[k]);
        for l in (k + 1)..n {
            let pp = at(k, 1.0, l, 1.0, &mut lagr);
            let pm = at(k, 1.0, l, -1.0, &mut lagr);
            let mp = at(k, -1.0, l, 1.0, &mut lagr);
            let mm = at(k, -1.0, l, -1.0, &mut lagr);
            if ![pp, pm, mp, mm].iter().all(|v| v.is_finite()) {
                return None;
            }
            let v = (pp - pm - mp + mm) / (4.0 * h[k] * h[l]);
            hess[(k, l)] = v;
            hess[(l, k)] = v;
        }
    }
    Some(hess)
}

/// KKT residual [grad f + J^T lambda; v_active]; None at a domain wall.
fn kkt_residual<O, V>(
    obj: &O,
    violations: &V,
    theta: &mut [f64],
    active: &[usize],
    lambda: &[f64],
) -> Option<DVector<f64>>
where
    O: Fn(&[f64]) -> f64,
    V: Fn(&[f64], &mut Vec<f64>),
{
    let n = theta.len();
    let f0 = obj(theta);
    if !f0.is_finite() {
        return None;
    }
    let g = fd_gradient(obj, theta, f0)?;
    let jac = fd_jacobian(violations, theta, active);
    let v = eval_violations(violations, theta);
    let mut res = DVector::zeros(n + active.len());
    for k in 0..n {
        let mut r = g[k];
        for (row, l) in jac.iter().zip(lambda) {
            r += l * row[k];
        }
        res[k] = r;
    }
    for (i, &j) in active.iter().enumerate() {
        res[n + i] = v[j];
    }
    Some(res)
}

struct NewtonResult {
    theta: Vec<f64>,
    lambda: Vec<f64>,
}

/// Quasi-Newton on the KKT system with the Hessian frozen at entry. The
/// constraint Jacobian and residual are exact (finite differences) at every
/// iterate, so the fixed point is a true KKT point of the smooth problem.
fn newton_on_active_set<O, V, P>(
    obj: &O,
    violations: &V,
    project: &P,
    theta_in: &[f64],
    active: &[usize],
) -> Option<NewtonResult>
where
    O: Fn(&[f64]) -> f64,
    V: Fn(&[f64], &mut Vec<f64>),
    P: Fn(&mut [f64]),
{
    let n = theta_in.len();
    let m = active.len();
    let mut theta = theta_in.to_vec();

    // least-squares multipliers from the stationarity block
    let f0 = obj(&theta);
    if !f0.is_finite() {
        return None;
    }
    let g = fd_gradient(obj, &mut theta, f0)?;
    let jac = fd_jacobian(violations, &mut theta, active);
    let mut gram = DMatrix::zeros(m, m);
    let mut rhs = DVector::zeros(m);
    for r in 0..m {
        for c in 0..=r {
            let dot: f64 = jac[r].iter().zip(&jac[c]).map(|(a, b)| a * b).sum();
            gram[(r, c)] = dot;
            gram[(c, r)] = dot;
        }
        rhs[r] = -jac[r].iter().zip(&g).map(|(a, b)| a * b).sum::<f64>();
    }
    let ridge = 1e-10 * (gram.trace() / m.max(1) as f64).max(1.0);
    for r in 0..m {
        gram[(r, r)] += ridge;
    }
    let mut lambda: Vec<f64> = match gram.lu().solve(&rhs) {
        Some(sol) => sol.iter().copied().collect(),
        None => vec![0.0; m],
    };

    let hess = fd_hessian(obj, violations, &mut theta, active, &lambda)?;
    // frozen KKT matrix [H J^T; J 0] with a small ridge in the corner block
    let build = |extra: f64| {
        let mut k = DMatrix::zeros(n + m, n + m);
        for i in 0..n {
            for j in 0..n {
                k[(i, j)] = hess[(i, j)];
            }
            k[(i, i)] += extra;
        }
        for (r, row) in jac.iter().enumerate() {
            for (c, val) in row.iter().enumerate() {
                k[(n + r, c)] = *val;
                k[(c, n + r)] = *val;
            }
        }
        k
    };
    let scale = hess.amax().max(1.0);
    let lu = match build(1e-12 * scale).lu().try_inverse() {
        Some(inv) => inv,
        None => build(1e-7 * scale).lu().try_inverse()?,
    };

    let mut res = kkt_residual(obj, violations, &mut theta, active, &lambda)?;
    let target = 1e-10 * (1.0 + res.amax());
    for _ in 0..MAX_NEWTON {
        if res.amax() <= target {
            break;
        }
        let delta = &lu * &res;
        let mut alpha = 1.0;
        let mut advanced = false;
        for _ in 0..8 {
            let mut cand = theta.clone();
            for k in 0..n {
                cand[k] -= alpha * delta[k];
            }
            project(&mut cand);
            let cand_lambda: Vec<f64> = lambda
                .iter()
                .enumerate()
                .map(|(i, l)| l - alpha * delta[n + i])
                .collect();
            if let Some(cand_res) =
                kkt_residual(obj, violations, &mut cand, active, &cand_lambda)
            {
                if cand_res.norm_squared() <= (1.0 - 1e-4 * alpha) * res.norm_squared() {
                    theta = cand;
                    lambda = cand_lambda;
                    res = cand_res;
                    advanced = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !advanced {
            break;
        }
    }
    Some(NewtonResult { theta, lambda })
}

/// Refines `theta_in` against the smooth problem and returns the improved
/// parameters, or None when no candidate passes validation.
pub(crate) fn polish<O, V, P>(
    obj: &O,
    violations: &V,
    project: &P,
    theta_in: &[f64],
    constraint_tol: f64,
) -> Option<Vec<f64>>
where
    O: Fn(&[f64]) -> f64,
    V: Fn(&[f64], &mut Vec<f64>),
    P: Fn(&mut [f64]),
{
    let f_in = obj(theta_in);
    if !f_in.is_finite() {
        return None;
    }
    let v_in = eval_violations(violations, theta_in);
    let n = theta_in.len();

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for tol_a in ACTIVE_TOLS {
        let mut active: Vec<usize> = (0..v_in.len()).filter(|&j| v_in[j] >= -tol_a).collect();
        if active.len() > n {
            // keep the tightest constraints; a KKT point never needs more
            // active rows than parameters
            active.sort_by(|&a, &b| v_in[b].partial_cmp(&v_in[a]).unwrap());
            active.truncate(n);
            active.sort_unstable();
        }
        if active.is_empty() || !seen.insert(active.clone()) {
            continue;
        }

        for _ in 0..MAX_PRUNE {
            let Some(run) = newton_on_active_set(obj, violations, project, theta_in, &active)
            else {
                break;
            };
            // a persistently negative multiplier marks a constraint that the
            // optimum pushes away from; drop it and resolve
            let (mut worst_l, mut worst_i) = (f64::INFINITY, usize::MAX);
            for (i, l) in run.lambda.iter().enumerate() {
                if *l < worst_l {
                    worst_l = *l;
                    worst_i = i;
                }
            }
            if worst_l < -1e-8 && active.len() > 1 {
                active.remove(worst_i);
                continue;
            }

            let f_out = obj(&run.theta);
            let worst_violation = eval_violations(violations, &run.theta)
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            let valid = f_out.is_finite()
                && f_out <= f_in + 1e-12 * (1.0 + f_in.abs())
                && worst_violation <= constraint_tol
                && worst_l >= -1e-8;
            if valid && best.as_ref().is_none_or(|(b, _)| f_out < *b) {
                best = Some((f_out, run.theta));
            }
            break;
        }
    }
    best.map(|(_, theta)| theta)
}

//! Smoothed exact-penalty first-order minimizer.
//!
//! Minimizes `obj(theta) + mu * sum_i sigma * softplus(v_i(theta) / sigma)`
//! over outer rounds with growing `mu` and shrinking `sigma`. The smoothed
//! term tends to `mu * max(0, v_i)` as `sigma -> 0`, so once `mu` dominates
//! the largest multiplier the inner minimizers approach the constrained
//! optimum from the feasible side. Gradients are central finite differences
//! on the raw parameter vector.
//!
//! Steps are gradient descent with Armijo backtracking followed by a
//! caller-supplied projection. The penalty walls have curvature of order
//! mu/sigma, so a plain descent step small enough to be stable across a wall
//! cannot make progress along it; when the plain step collapses, the search
//! falls back to the gradient projected onto the tangent space of the
//! near-active constraint normals (estimated by differencing the raw
//! violations), which restores O(1) steps along the walls. Both step kinds
//! only accept decreases, so the recorded penalized values fall
//! monotonically within every round.

use serde::{Deserialize, Serialize};

/// One outer penalty round at fixed (mu, sigma).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PenaltyRound {
    pub mu: f64,
    pub sigma: f64,
    /// Penalized objective at round start, then after every accepted step.
    pub penalized: Vec<f64>,
}

/// Outer/inner loop schedule. Callers derive it from `SolverConfig`.
#[derive(Debug, Clone)]
pub(crate) struct PenaltySchedule {
    pub mu0: f64,
    pub mu_growth: f64,
    pub mu_cap: f64,
    pub sigma0: f64,
    pub sigma_shrink: f64,
    pub sigma_floor: f64,
    pub rounds: u32,
    pub inner: u32,
    pub step0: f64,
    pub constraint_tol: f64,
    pub objective_tol: f64,
}

impl Default for PenaltySchedule {
    fn default() -> Self {
        Self {
            mu0: 10.0,
            mu_growth: 10.0,
            mu_cap: 1e9,
            sigma0: 1e-4,
            sigma_shrink: 0.5,
            sigma_floor: 1e-9,
            rounds: 24,
            inner: 400,
            step0: 0.1,
            constraint_tol: 1e-9,
            objective_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PenaltyOutcome {
    pub theta: Vec<f64>,
    pub objective: f64,
    /// Largest raw constraint value at the final point (<= 0 means feasible).
    pub worst_violation: f64,
    pub iterations: u64,
    pub converged: bool,
    pub rounds: Vec<PenaltyRound>,
}

/// Overflow-safe ln(1 + e^z).
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Orthonormal basis (modified Gram-Schmidt) for the span of the given rows,
/// capped at `max_dirs`; near-dependent rows are dropped.
fn orthonormalize(rows: Vec<Vec<f64>>, max_dirs: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut r in rows {
        if basis.len() >= max_dirs {
            break;
        }
        let scale = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(scale > 0.0) || !scale.is_finite() {
            continue;
        }
        for q in &basis {
            let dot: f64 = q.iter().zip(&r).map(|(a, b)| a * b).sum();
            for (ri, qi) in r.iter_mut().zip(q) {
                *ri -= dot * qi;
            }
        }
        let rem = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if rem > 1e-8 * scale {
            for x in &mut r {
                *x /= rem;
            }
            basis.push(r);
        }
    }
    basis
}

/// Runs the penalty loop. `objective` may return non-finite values for
/// out-of-domain parameters (such points are never accepted); `violations`
/// appends one entry per constraint, positive meaning infeasible; `project`
/// restores invariants (PSD clipping) after every accepted step.
pub(crate) fn minimize<O, V, P>(
    objective: O,
    violations: V,
    project: P,
    theta0: Vec<f64>,
    sched: &PenaltySchedule,
) -> PenaltyOutcome
where
    O: Fn(&[f64]) -> f64,
    V: Fn(&[f64], &mut Vec<f64>),
    P: Fn(&mut [f64]),
{
    let n = theta0.len();
    let mut buf: Vec<f64> = Vec::new();

    let penalized = |theta: &[f64], mu: f64, sigma: f64, buf: &mut Vec<f64>| -> f64 {
        let o = objective(theta);
        if !o.is_finite() {
            return f64::INFINITY;
        }
        buf.clear();
        violations(theta, buf);
        let mut pen = 0.0;
        for &v in buf.iter() {
            pen += sigma * softplus(v / sigma);
        }
        o + mu * pen
    };

    let mut theta = theta0;
    project(&mut theta);

    let mut mu = sched.mu0;
    let mut sigma = sched.sigma0;
    let mut rounds_log: Vec<PenaltyRound> = Vec::new();
    let mut total_iters: u64 = 0;
    let mut obj_prev_round = f64::INFINITY;
    let mut converged = false;
    let mut grad = vec![0.0; n];
    let mut vcur: Vec<f64> = Vec::new();
    let mut vp: Vec<f64> = Vec::new();
    let mut vm: Vec<f64> = Vec::new();

    for _round in 0..sched.rounds {
        let mut f_cur = penalized(&theta, mu, sigma, &mut buf);
        vcur.clone_from(&buf);
        let mut log = vec![f_cur];
        let mut step = sched.step0 * (1.0 + linf(&theta));
        let mut t_step = step;
        let mut stationary = false;

        // FD width: a third of the smoothing width, so differences resolve
        // the wall force profile (error scales with (h/sigma)^2); the floor
        // keeps roundoff noise in the differences negligible.
        let h_base = (sigma / 3.0).clamp(1e-9, 3e-6);

        // A constraint shapes the local landscape iff its smoothed force
        // mu * sigmoid(v / sigma) is non-negligible; beyond this distance
        // the force is under 1e-4 and the wall is transparent to steps.
        let wall = sigma * (mu / 1e-4).ln();

        for _it in 0..sched.inner {
            total_iters += 1;
            let f_iter_start = f_cur;

            // central finite differences, one-sided next to domain walls
            for k in 0..n {
                let h = h_base * (1.0 + theta[k].abs());
                let saved = theta[k];
                theta[k] = saved + h;
                let fp = penalized(&theta, mu, sigma, &mut buf);
                theta[k] = saved - h;
                let fm = penalized(&theta, mu, sigma, &mut buf);
                theta[k] = saved;
                grad[k] = match (fp.is_finite(), fm.is_finite()) {
                    (true, true) => (fp - fm) / (2.0 * h),
                    (true, false) => (fp - f_cur) / h,
                    (false, true) => (f_cur - fm) / h,
                    (false, false) => 0.0,
                };
            }

            let gmax = linf(&grad);
            if gmax <= 1e-7 * (1.0 + f_cur.abs()) {
                stationary = true;
                break;
            }

            // plain descent along -grad while its step has not collapsed
            let floor = 1e-14 * (1.0 + linf(&theta));
            let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
            let mut accepted = false;
            let mut halvings = 0u32;
            while step >= floor {
                let mut cand = theta.clone();
                for k in 0..n {
                    cand[k] -= step * grad[k];
                }
                project(&mut cand);
                let f_cand = penalized(&cand, mu, sigma, &mut buf);
                if f_cand <= f_cur - 1e-4 * step * gnorm2 {
                    theta = cand;
                    f_cur = f_cand;
                    vcur.clone_from(&buf);
                    log.push(f_cur);
                    accepted = true;
                    break;
                }
                step *= 0.5;
                halvings += 1;
            }
            // A healthy plain step ends the iteration. A wall-limited one
            // (many rejections, or a microscopic accepted move) still zigzags
            // against stiff penalty curvature, so fall through and let the
            // tangent pass try to slide along the walls from the new point.
            let wall_limited = !accepted || halvings >= 2 || step <= 1e-6 * (1.0 + linf(&theta));
            if accepted {
                step = (step * 2.0).min(1e3 * (1.0 + linf(&theta)));
                if !wall_limited {
                    continue;
                }
            }

            // The plain step collapsed against a wall. Difference the raw
            // violations of near-active constraints, project the gradient
            // onto the complement of their normals, and search along that.
            let active: Vec<usize> = (0..vcur.len()).filter(|&j| vcur[j] >= -wall).collect();
            let mut normals: Vec<Vec<f64>> = vec![vec![0.0; n]; active.len()];
            for k in 0..n {
                let h = h_base * (1.0 + theta[k].abs());
                let saved = theta[k];
                theta[k] = saved + h;
                vp.clear();
                violations(&theta, &mut vp);
                theta[k] = saved - h;
                vm.clear();
                violations(&theta, &mut vm);
                theta[k] = saved;
                for (row, &j) in normals.iter_mut().zip(&active) {
                    let d = (vp[j] - vm[j]) / (2.0 * h);
                    row[k] = if d.is_finite() { d } else { 0.0 };
                }
            }
            let basis = orthonormalize(normals.clone(), n.saturating_sub(1));
            let mut gt = grad.clone();
            for q in &basis {
                let dot: f64 = q.iter().zip(&gt).map(|(a, b)| a * b).sum();
                for (gi, qi) in gt.iter_mut().zip(q) {
                    *gi -= dot * qi;
                }
            }
            let gtnorm2: f64 = gt.iter().map(|g| g * g).sum();
            if gtnorm2.sqrt() <= 1e-7 * (1.0 + f_cur.abs()) {
                if accepted {
                    continue;
                }
                // tangent-stationary against the active walls
                stationary = true;
                break;
            }

            // Restoration operator: the walls are curved, so a straight
            // tangent move drifts off them quadratically and large mu would
            // veto useful step lengths. Pulling the active violations back
            // to their pre-move values (least-norm correction through the
            // normals) removes the drift before the candidate is scored.
            let restore = |cand: &mut Vec<f64>, scratch: &mut Vec<f64>| {
                if active.is_empty() {
                    return;
                }
                scratch.clear();
                violations(cand, scratch);
                let a = active.len();
                let mut gram = nalgebra::DMatrix::<f64>::zeros(a, a);
                for r in 0..a {
                    for c in 0..=r {
                        let dot: f64 = normals[r]
                            .iter()
                            .zip(&normals[c])
                            .map(|(x, y)| x * y)
                            .sum();
                        gram[(r, c)] = dot;
                        gram[(c, r)] = dot;
                    }
                }
                let ridge = 1e-12 * (gram.trace().abs() / a as f64).max(1.0);
                for r in 0..a {
                    gram[(r, r)] += ridge;
                }
                let delta = nalgebra::DVector::<f64>::from_fn(a, |r, _| {
                    let j = active[r];
                    let want = vcur[j] - scratch[j];
                    if want.is_finite() {
                        want
                    } else {
                        0.0
                    }
                });
                if let Some(w) = gram.lu().solve(&delta) {
                    for (r, wr) in w.iter().enumerate() {
                        for (ci, nk) in cand.iter_mut().zip(&normals[r]) {
                            *ci += wr * nk;
                        }
                    }
                }
            };

            t_step = t_step.max(16.0 * floor);
            let mut t_accepted = false;
            for _bt in 0..60 {
                let mut cand = theta.clone();
                for k in 0..n {
                    cand[k] -= t_step * gt[k];
                }
                restore(&mut cand, &mut vp);
                project(&mut cand);
                let f_cand = penalized(&cand, mu, sigma, &mut buf);
                if f_cand <= f_cur - 1e-4 * t_step * gtnorm2 {
                    theta = cand;
                    f_cur = f_cand;
                    vcur.clone_from(&buf);
                    log.push(f_cur);
                    // the wall moved; give the plain step another chance
                    step = t_step;
                    t_step = (t_step * 2.0).min(1e3 * (1.0 + linf(&theta)));
                    t_accepted = true;
                    break;
                }
                t_step *= 0.5;
                if t_step < floor {
                    break;
                }
            }
            if !t_accepted && !accepted {
                // neither step kind progresses: stationary at this smoothing
                stationary = true;
                break;
            }
            if f_iter_start - f_cur <= 1e-13 * (1.0 + f_cur.abs()) {
                // accepted steps no longer move the value: numerically settled
                stationary = true;
                break;
            }
        }

        rounds_log.push(PenaltyRound {
            mu,
            sigma,
            penalized: log,
        });

        let obj_now = objective(&theta);
        buf.clear();
        violations(&theta, &mut buf);
        let worst = buf.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
        let worst = if worst.is_finite() { worst } else { 0.0 };
        let settled =
            (obj_now - obj_prev_round).abs() <= sched.objective_tol * obj_now.abs().max(1.0);
        if stationary && worst <= sched.constraint_tol && settled {
            converged = true;
            break;
        }
        obj_prev_round = obj_now;
        mu = (mu * sched.mu_growth).min(sched.mu_cap);
        sigma = (sigma * sched.sigma_shrink).max(sched.sigma_floor);
    }

    let objective_final = objective(&theta);
    buf.clear();
    violations(&theta, &mut buf);
    let worst_violation = buf
        .iter()
        .fold(f64::NEG_INFINITY, |m, v| m.max(*v))
        .max(f64::NEG_INFINITY);
    let worst_violation = if worst_violation.is_finite() {
        worst_violation
    } else {
        0.0
    };

    PenaltyOutcome {
        theta,
        objective: objective_final,
        worst_violation,
        iterations: total_iters,
        converged,
        rounds: rounds_log,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short_schedule() -> PenaltySchedule {
        PenaltySchedule {
            inner: 200,
            ..PenaltySchedule::default()
        }
    }

    #[test]
    fn unconstrained_quadratic_reaches_minimum() {
        let out = minimize(
            |t| (t[0] - 3.0).powi(2) + 2.0 * (t[1] + 1.0).powi(2),
            |_, _| {},
            |_| {},
            vec![0.0, 0.0],
            &short_schedule(),
        );
        assert!(out.converged);
        assert!((out.theta[0] - 3.0).abs() < 1e-6, "{:?}", out.theta);
        assert!((out.theta[1] + 1.0).abs() < 1e-6, "{:?}", out.theta);
        assert!(out.objective < 1e-10);
    }

    #[test]
    fn active_constraint_lands_on_boundary_from_feasible_side() {
        // minimize (x-2)^2 subject to x <= 1: optimum x = 1, multiplier 2
        let out = minimize(
            |t| (t[0] - 2.0).powi(2),
            |t, v| v.push(t[0] - 1.0),
            |_| {},
            vec![-3.0],
            &short_schedule(),
        );
        assert!(out.converged, "worst={}", out.worst_violation);
        assert!(out.worst_violation <= 1e-9);
        assert!((out.theta[0] - 1.0).abs() < 1e-5, "x = {}", out.theta[0]);
        assert!((out.objective - 1.0).abs() < 1e-4);
    }

    #[test]
    fn infeasible_start_recovers() {
        // minimize x subject to x >= 0 (violation -x), start deep infeasible
        let out = minimize(
            |t| t[0],
            |t, v| v.push(-t[0]),
            |_| {},
            vec![-50.0],
            &short_schedule(),
        );
        assert!(out.worst_violation <= 1e-9);
        assert!(out.theta[0].abs() < 1e-4, "x = {}", out.theta[0]);
    }

    #[test]
    fn penalized_trace_is_monotone_within_rounds() {
        let out = minimize(
            |t| (t[0] - 2.0).powi(2) + t[1] * t[1],
            |t, v| {
                v.push(t[0] - 1.0);
                v.push(-t[0] - 4.0);
            },
            |_| {},
            vec![5.0, -2.0],
            &short_schedule(),
        );
        for round in &out.rounds {
            for w in round.penalized.windows(2) {
                assert!(w[1] <= w[0], "non-monotone round: {:?}", round.penalized);
            }
        }
    }

    #[test]
    fn projection_is_applied_to_iterates() {
        // projection forces t[0] >= 1.5 regardless of the objective pull
        let out = minimize(
            |t| t[0] * t[0],
            |_, _| {},
            |t| {
                if t[0] < 1.5 {
                    t[0] = 1.5;
                }
            },
            vec![4.0],
            &short_schedule(),
        );
        assert!((out.theta[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn domain_errors_are_rejected_not_accepted() {
        // objective is -inf-proof: non-finite for t[0] < 0.5; optimum at wall
        let out = minimize(
            |t| {
                if t[0] < 0.5 {
                    f64::NAN
                } else {
                    t[0]
                }
            },
            |_, _| {},
            |_| {},
            vec![2.0],
            &short_schedule(),
        );
        assert!(out.theta[0] >= 0.5 - 1e-12);
        assert!(out.theta[0] < 0.5 + 1e-3, "x = {}", out.theta[0]);
    }

    #[test]
    fn softplus_matches_reference_values() {
        assert!((softplus(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((softplus(50.0) - 50.0).abs() < 1e-15);
        assert!(softplus(-50.0) > 0.0);
        assert!(softplus(-50.0) < 1e-21);
        // symmetry identity softplus(z) - softplus(-z) = z
        for &z in &[0.3, 1.7, 12.0] {
            assert!((softplus(z) - softplus(-z) - z).abs() < 1e-12);
        }
    }
}

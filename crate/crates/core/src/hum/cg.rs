use super::penalized::{control_inner, control_norm, evaluate, to_control, Evaluation, HumConfig};
use crate::domain::{row_norm, SpaceTimeField};
use crate::error::Result;
use crate::nash::{NashProblem, NashSolution};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CgStep {
    pub iteration: usize,
    pub value: f64,
    pub gradient_norm: f64,
    pub restarted: bool,
}

#[derive(Debug, Clone)]
pub struct HumResult {
    pub epsilon: f64,
    pub h: SpaceTimeField,
    pub y_final_norm: f64,
    pub h_norm: f64,
    pub gradient_norm: f64,
    /// `‖h − ρ‖` on `ω_T`, from a fresh evaluation at the returned `h`.
    pub characterization_residual: f64,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub log: Vec<CgStep>,
    pub nash: NashSolution,
    pub rho: SpaceTimeField,
}

/// The same problem with `y⁰ = 0` and zero targets, whose gradient map is
/// the Hessian of `J_ε`.
fn homogeneous(problem: &NashProblem) -> NashProblem {
    let mut p = problem.clone();
    p.y0.iter_mut().for_each(|v| *v = 0.0);
    for t in p.cost.targets.iter_mut() {
        *t = SpaceTimeField::zeros(&problem.model.grid);
    }
    p
}

fn finish(problem: &NashProblem, h: SpaceTimeField, ev: Evaluation, cfg: &HumConfig, iterations: usize, converged: bool, log: Vec<CgStep>) -> HumResult {
    let g = ev.gradient.expect("gradient present");
    let gn = control_norm(problem, &g);
    HumResult {
        epsilon: cfg.epsilon,
        y_final_norm: row_norm(&problem.model.grid, ev.nash.y.last_row()),
        h_norm: control_norm(problem, &h),
        gradient_norm: gn,
        characterization_residual: gn,
        value: ev.value,
        iterations,
        converged,
        log,
        rho: ev.adjoint.expect("adjoint present").rho,
        nash: ev.nash,
        h,
    }
}

/// Polak–Ribière conjugate gradients with exact line search on the
/// quadratic `J_ε`. Hessian products come from the homogeneous problem;
/// the gradient is carried by recurrence and refreshed periodically.
pub fn minimize_cg(problem: &NashProblem, cfg: &HumConfig, h_init: Option<&SpaceTimeField>) -> Result<HumResult> {
    cfg.validate()?;
    let grid = &problem.model.grid;
    let hom = homogeneous(problem);
    let mut h = match h_init {
        Some(h0) => to_control(problem, h0),
        None => SpaceTimeField::zeros(grid),
    };
    let mut ev = evaluate(problem, &h, cfg, None)?;
    let mut g = ev.gradient.clone().expect("gradient present");
    let mut value = ev.value;
    let mut gg = control_inner(problem, &g, &g);
    let mut log = vec![CgStep {
        iteration: 0,
        value,
        gradient_norm: gg.sqrt(),
        restarted: false,
    }];
    if gg.sqrt() <= cfg.cg_tol {
        return Ok(finish(problem, h, ev, cfg, 0, true, log));
    }
    let mut d = g.scaled(-1.0);
    let mut since_refresh = 0;
    for it in 1..=cfg.cg_max_iter {
        let ad = evaluate(&hom, &d, cfg, None)?.gradient.expect("gradient present");
        let dad = control_inner(problem, &d, &ad);
        let gd = control_inner(problem, &g, &d);
        if !(dad > 0.0) {
            log::warn!("non-positive curvature {dad:e} along the search direction");
            break;
        }
        let step = -gd / dad;
        h.axpy(step, &d);
        let predicted = value + step * gd + 0.5 * step * step * dad;
        since_refresh += 1;
        let mut restarted = false;
        let g_new = if since_refresh >= cfg.refresh_every {
            since_refresh = 0;
            ev = evaluate(problem, &h, cfg, Some(&ev.nash.p))?;
            if ev.value > value {
                restarted = true;
            }
            value = ev.value;
            ev.gradient.clone().expect("gradient present")
        } else {
            value = predicted;
            let mut gn = g.clone();
            gn.axpy(step, &ad);
            gn
        };
        let gg_new = control_inner(problem, &g_new, &g_new);
        let pr = (gg_new - control_inner(problem, &g_new, &g)) / gg;
        let beta = if restarted { 0.0 } else { pr.max(0.0) };
        log.push(CgStep {
            iteration: it,
            value,
            gradient_norm: gg_new.sqrt(),
            restarted,
        });
        g = g_new;
        gg = gg_new;
        if gg.sqrt() <= cfg.cg_tol {
            // Confirm with a fresh gradient before stopping.
            ev = evaluate(problem, &h, cfg, Some(&ev.nash.p))?;
            let fresh = ev.gradient.clone().expect("gradient present");
            let fresh_norm = control_norm(problem, &fresh);
            if fresh_norm <= cfg.cg_tol {
                return Ok(finish(problem, h, ev, cfg, it, true, log));
            }
            value = ev.value;
            g = fresh;
            gg = fresh_norm * fresh_norm;
            since_refresh = 0;
            d = g.scaled(-1.0);
            continue;
        }
        let mut next = g.scaled(-1.0);
        next.axpy(beta, &d);
        d = next;
    }
    let ev = evaluate(problem, &h, cfg, Some(&ev.nash.p))?;
    let iterations = log.len() - 1;
    let ok = control_norm(problem, ev.gradient.as_ref().expect("gradient present")) <= cfg.cg_tol;
    Ok(finish(problem, h, ev, cfg, iterations, ok, log))
}

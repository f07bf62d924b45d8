use super::problem::NashProblem;
use crate::domain::{Levels, Region, SpaceTimeField};
use crate::error::Result;
use crate::solver::{central_divergence_adjoint, central_gradient, march_backward};

/// `Jᵢ(h; v¹, v²)` with the state recomputed from the controls.
pub fn eval_cost(problem: &NashProblem, i: usize, h: &SpaceTimeField, v1: &SpaceTimeField, v2: &SpaceTimeField) -> Result<f64> {
    let y = problem.state(h, [v1, v2], None)?;
    let v = if i == 0 { v1 } else { v2 };
    Ok(problem.cost.value(&problem.model, i, &y, v))
}

/// A directional derivative of `Jᵢ` in its own control, computed three ways.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FirstDerivative {
    /// Through the state sensitivity `zⁱ`.
    pub tangent: f64,
    /// Through the follower adjoint `pⁱ`.
    pub adjoint: f64,
    /// Central difference of [`eval_cost`].
    pub fd: f64,
    pub fd_step: f64,
}

/// A second directional derivative of `Jᵢ` in its own control.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SecondDerivative {
    /// Through the sensitivity pair `(φ, η)`.
    pub systems: f64,
    /// Second-order central difference of [`eval_cost`].
    pub fd: f64,
    pub fd_step: f64,
    /// `‖w‖²` on `ωᵢ × (0, T)`.
    pub norm_sq: f64,
    /// `systems − μᵢ ‖w‖²`, the contribution beyond the control penalty.
    pub margin: f64,
}

fn with_perturbation(v: [&SpaceTimeField; 2], i: usize, w: &SpaceTimeField, t: f64) -> [SpaceTimeField; 2] {
    let mut out = [v[0].clone(), v[1].clone()];
    out[i].axpy(t, w);
    out
}

fn cost_at(problem: &NashProblem, h: &SpaceTimeField, v: &[SpaceTimeField; 2], i: usize) -> Result<f64> {
    eval_cost(problem, i, h, &v[0], &v[1])
}

fn step(problem: &NashProblem, v: &SpaceTimeField, i: usize, rel: f64) -> f64 {
    let grid = &problem.model.grid;
    rel * v.norm(grid, Some(problem.model.mask(Region::follower(i))), Levels::Backward).max(1.0)
}

/// Gâteaux derivative of `Jᵢ` at `(h; v¹, v²)` in direction `(w, 0)` or
/// `(0, w)`. Vanishes at a Nash equilibrium.
pub fn stationarity_residual(
    problem: &NashProblem,
    h: &SpaceTimeField,
    v: [&SpaceTimeField; 2],
    w: &SpaceTimeField,
    i: usize,
    fd_rel: f64,
) -> Result<FirstDerivative> {
    let model = &problem.model;
    let grid = &model.grid;
    let mi = model.mask(Region::follower(i));
    let y = problem.state(h, v, None)?;
    let wm = w.masked(mi);
    let penalty = problem.cost.mu[i] * v[i].inner(&wm, grid, Some(mi), Levels::Backward);

    let z = problem.tangent(&y, &wm)?;
    let resid = y.zip_map(&problem.cost.targets[i], |a, b| a - b);
    let tangent =
        problem.cost.alpha[i] * resid.inner(&z, grid, Some(model.mask(Region::Observation)), Levels::Forward) + penalty;

    let p = problem.follower_adjoint(&y, i, &problem.adjoint_coefficients(&y))?;
    let adjoint = wm.inner(&p, grid, Some(mi), Levels::Backward) + penalty;

    let d = step(problem, v[i], i, fd_rel);
    let plus = cost_at(problem, h, &with_perturbation(v, i, &wm, d), i)?;
    let minus = cost_at(problem, h, &with_perturbation(v, i, &wm, -d), i)?;
    Ok(FirstDerivative {
        tangent,
        adjoint,
        fd: (plus - minus) / (2.0 * d),
        fd_step: d,
    })
}

/// Second derivative `D²ᵢJᵢ (w, w)` at `(h; v¹, v²)`.
pub fn convexity_probe(
    problem: &NashProblem,
    h: &SpaceTimeField,
    v: [&SpaceTimeField; 2],
    w: &SpaceTimeField,
    i: usize,
    fd_rel: f64,
) -> Result<SecondDerivative> {
    let model = &problem.model;
    let grid = &model.grid;
    let x = grid.nodes();
    let n = grid.n();
    let mi = model.mask(Region::follower(i));
    let md = model.mask(Region::Observation);
    let alpha = problem.cost.alpha[i];
    let mu = problem.cost.mu[i];
    let wm = w.masked(mi);

    let y = problem.state(h, v, None)?;
    let coeffs = problem.adjoint_coefficients(&y);
    let p = problem.follower_adjoint(&y, i, &coeffs)?;
    let phi = problem.tangent(&y, &wm)?;

    let mut src = phi.map(|f| alpha * f).masked(md);
    if let Some(c) = problem.curvature(&y) {
        for k in 0..grid.m() {
            let row = k + 1;
            let ph = phi.row(row);
            let dph = central_gradient(x, ph);
            let pk = p.row(k);
            let mut flux = vec![0.0; n + 1];
            let mut react = vec![0.0; n + 1];
            for j in 1..n {
                let r1 = c.d11.get(row, j) * ph[j] + c.d12.get(row, j) * dph[j];
                let r2 = c.d21.get(row, j) * ph[j] + c.d22.get(row, j) * dph[j];
                react[j] = r1 * pk[j];
                flux[j] = r2 * pk[j];
            }
            let div = central_divergence_adjoint(x, &flux);
            let out = src.row_mut(row);
            for j in 1..n {
                out[j] -= react[j] + div[j];
            }
        }
    }
    let zero = vec![0.0; n + 1];
    let eta = march_backward(model, &coeffs, Some(&src), &zero)?;
    let norm_sq = wm.inner(&wm, grid, Some(mi), Levels::Backward);
    let systems = eta.inner(&wm, grid, Some(mi), Levels::Backward) + mu * norm_sq;

    let d = step(problem, v[i], i, fd_rel);
    let base = cost_at(problem, h, &[v[0].clone(), v[1].clone()], i)?;
    let plus = cost_at(problem, h, &with_perturbation(v, i, &wm, d), i)?;
    let minus = cost_at(problem, h, &with_perturbation(v, i, &wm, -d), i)?;
    Ok(SecondDerivative {
        systems,
        fd: (plus - 2.0 * base + minus) / (d * d),
        fd_step: d,
        norm_sq,
        margin: systems - mu * norm_sq,
    })
}

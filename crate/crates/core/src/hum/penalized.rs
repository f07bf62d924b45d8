use crate::domain::{row_norm, Levels, Region, SpaceTimeField};
use crate::error::{Error, Result};
use crate::nash::{solve_nash_from, LeaderAdjoint, NashOptions, NashProblem, NashSolution};

/// Penalty, CG controls and inner tolerances of the leader problem.
#[derive(Debug, Clone, PartialEq)]
pub struct HumConfig {
    pub epsilon: f64,
    pub cg_tol: f64,
    pub cg_max_iter: usize,
    /// Recompute the gradient from scratch every this many CG steps.
    pub refresh_every: usize,
    pub nash: NashOptions,
    pub epsilon_list: Vec<f64>,
}

impl Default for HumConfig {
    fn default() -> Self {
        HumConfig {
            epsilon: 1e-2,
            cg_tol: 1e-8,
            cg_max_iter: 500,
            refresh_every: 25,
            nash: NashOptions {
                tol: 1e-14,
                max_iter: 400,
                ..NashOptions::default()
            },
            epsilon_list: vec![1e-1, 1e-2, 1e-3, 1e-4],
        }
    }
}

impl HumConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config("hum.epsilon", "must be positive"));
        }
        if !(self.cg_tol > 0.0) || !(self.nash.tol > 0.0) {
            return Err(Error::config("hum.cg_tol", "tolerances must be positive"));
        }
        if self.cg_max_iter == 0 || self.refresh_every == 0 {
            return Err(Error::config("hum.cg_max_iter", "must be positive"));
        }
        if self.epsilon_list.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::config("hum.epsilon_list", "entries must be positive"));
        }
        Ok(())
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        HumConfig {
            epsilon,
            ..self.clone()
        }
    }
}

/// State, follower equilibrium and leader adjoint at one leader control.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub value: f64,
    pub nash: NashSolution,
    pub adjoint: Option<LeaderAdjoint>,
    /// `h − χ_ω ρ` on the control levels.
    pub gradient: Option<SpaceTimeField>,
}

pub(crate) fn leader_mask(problem: &NashProblem) -> &[f64] {
    problem.model.mask(Region::Leader)
}

/// `⟨u, v⟩` on `ω × (0, T)` over the control levels.
pub fn control_inner(problem: &NashProblem, u: &SpaceTimeField, v: &SpaceTimeField) -> f64 {
    u.inner(v, &problem.model.grid, Some(leader_mask(problem)), Levels::Backward)
}

pub fn control_norm(problem: &NashProblem, u: &SpaceTimeField) -> f64 {
    control_inner(problem, u, u).max(0.0).sqrt()
}

/// Restricts a field to the leader region and zeroes the final level,
/// which no control quadrature reads.
pub fn to_control(problem: &NashProblem, u: &SpaceTimeField) -> SpaceTimeField {
    let mut out = u.masked(leader_mask(problem));
    out.row_mut(problem.model.grid.m()).fill(0.0);
    out
}

fn value_of(problem: &NashProblem, h: &SpaceTimeField, nash: &NashSolution, eps: f64) -> f64 {
    let yt = row_norm(&problem.model.grid, nash.y.last_row());
    0.5 * yt * yt / eps + 0.5 * control_inner(problem, h, h)
}

/// `J_ε(h) = 1/(2ε) ‖y(T)‖² + ½ ‖h‖²_{ω_T}` with the followers at their
/// Nash equilibrium.
pub fn eval_penalized(problem: &NashProblem, h: &SpaceTimeField, cfg: &HumConfig) -> Result<f64> {
    let nash = solve_nash_from(problem, h, None, &cfg.nash)?;
    Ok(value_of(problem, h, &nash, cfg.epsilon))
}

/// Value and exact discrete gradient `h − χ_ω ρ` with `ρ(T) = −y(T)/ε`.
pub fn evaluate(problem: &NashProblem, h: &SpaceTimeField, cfg: &HumConfig, warm: Option<&[SpaceTimeField; 2]>) -> Result<Evaluation> {
    let nash = solve_nash_from(problem, h, warm, &cfg.nash)?;
    let value = value_of(problem, h, &nash, cfg.epsilon);
    let terminal: Vec<f64> = nash.y.last_row().iter().map(|v| -v / cfg.epsilon).collect();
    let adjoint = problem.leader_adjoint(&terminal, &cfg.nash)?;
    let mut g = h.clone();
    g.axpy(-1.0, &adjoint.rho);
    let g = to_control(problem, &g);
    Ok(Evaluation {
        value,
        nash,
        adjoint: Some(adjoint),
        gradient: Some(g),
    })
}

pub fn gradient(problem: &NashProblem, h: &SpaceTimeField, cfg: &HumConfig) -> Result<SpaceTimeField> {
    Ok(evaluate(problem, h, cfg, None)?.gradient.expect("evaluate fills the gradient"))
}

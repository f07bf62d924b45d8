use super::cg::{minimize_cg, HumResult};
use super::penalized::HumConfig;
use crate::domain::{weighted_h1a_norm_sq, SpaceTimeField};
use crate::error::{Error, Result};
use crate::nash::{Dynamics, NashProblem};
use crate::nonlinear::quotient_coefficients;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for OuterOptions {
    fn default() -> Self {
        OuterOptions {
            tol: 1e-8,
            max_iter: 30,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StackelbergOutcome {
    pub result: HumResult,
    /// Relative `L²(0,T; H¹_a)` change of the state per outer iteration.
    pub residuals: Vec<f64>,
    /// `‖h‖` on `ω_T` after each outer iteration.
    pub h_norms: Vec<f64>,
    pub converged: bool,
}

impl StackelbergOutcome {
    pub fn iterations(&self) -> usize {
        self.residuals.len()
    }
}

/// `‖u‖²_{L²(0,T; H¹_a)}` over the state levels.
pub fn state_energy_sq(problem: &NashProblem, u: &SpaceTimeField) -> Result<f64> {
    let grid = &problem.model.grid;
    let mut total = 0.0;
    for k in 1..=grid.m() {
        total += grid.dt(k) * weighted_h1a_norm_sq(grid, u.row(k), &problem.model.diffusion)?;
    }
    Ok(total)
}

/// Outer fixed point for the semilinear leader problem: freeze the
/// integral-mean coefficients at `z`, solve the linear penalized problem,
/// and set `z` to the resulting state.
pub fn semilinear_stackelberg(problem: &NashProblem, cfg: &HumConfig, opts: &OuterOptions) -> Result<StackelbergOutcome> {
    let Dynamics::Semilinear { nl, picard } = &problem.dynamics else {
        return Err(Error::InvalidInput("the outer loop needs semilinear dynamics".into()));
    };
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(Error::config("hum.outer", "tolerance and iteration cap must be positive"));
    }
    let grid = &problem.model.grid;
    let mut z = SpaceTimeField::zeros(grid);
    let mut frozen = quotient_coefficients(nl.as_ref(), &problem.model, &z, picard.cap).coupled();
    let mut residuals = Vec::new();
    let mut h_norms = Vec::new();
    let mut warm: Option<SpaceTimeField> = None;
    for it in 1..=opts.max_iter {
        let linear = NashProblem {
            dynamics: Dynamics::Linear(frozen.clone()),
            ..problem.clone()
        };
        let result = minimize_cg(&linear, cfg, warm.as_ref())?;
        let y = result.nash.y.clone();
        let diff = state_energy_sq(problem, &y.zip_map(&z, |a, b| a - b))?.sqrt();
        let size = state_energy_sq(problem, &y)?.sqrt();
        let next = quotient_coefficients(nl.as_ref(), &problem.model, &y, picard.cap).coupled();
        // Unchanged coefficients reproduce the same iterate.
        let res = if next == frozen {
            0.0
        } else if size > 0.0 {
            diff / size
        } else {
            diff
        };
        residuals.push(res);
        h_norms.push(result.h_norm);
        log::debug!("outer iteration {it}: residual {res:e}, ‖h‖ = {:e}", result.h_norm);
        if !res.is_finite() {
            return Err(Error::Divergence {
                what: "semilinear outer loop",
                iteration: it,
                residual: res,
            });
        }
        if res <= opts.tol {
            return Ok(StackelbergOutcome {
                result,
                residuals,
                h_norms,
                converged: true,
            });
        }
        warm = Some(result.h.clone());
        frozen = next;
        z = y;
        if it == opts.max_iter {
            return Ok(StackelbergOutcome {
                result,
                residuals,
                h_norms,
                converged: false,
            });
        }
    }
    unreachable!("loop returns on its last iteration")
}

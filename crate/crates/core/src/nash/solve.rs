use super::problem::NashProblem;
use crate::domain::{Levels, SpaceTimeField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NashOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Under-relaxation factor applied to the adjoint update.
    pub relax: f64,
    /// Consecutive residual increases that count as divergence.
    pub divergence_window: usize,
}

impl Default for NashOptions {
    fn default() -> Self {
        NashOptions {
            tol: 1e-10,
            max_iter: 200,
            relax: 0.8,
            divergence_window: 5,
        }
    }
}

/// Follower equilibrium for a fixed leader control.
#[derive(Debug, Clone)]
pub struct NashSolution {
    pub y: SpaceTimeField,
    pub p: [SpaceTimeField; 2],
    /// `vⁱ = −pⁱ χ_{ωᵢ} / μᵢ`, bit for bit.
    pub v: [SpaceTimeField; 2],
    /// Relative block update per sweep.
    pub residuals: Vec<f64>,
}

impl NashSolution {
    pub fn iterations(&self) -> usize {
        self.residuals.len()
    }
}

/// Block Gauss–Seidel on the follower optimality system: state forward with
/// `vⁱ = −pⁱ/μᵢ`, then both adjoints backward, relaxed.
pub fn solve_nash(problem: &NashProblem, h: &SpaceTimeField, opts: &NashOptions) -> Result<NashSolution> {
    solve_nash_from(problem, h, None, opts)
}

/// As [`solve_nash`], starting from given follower adjoints.
pub fn solve_nash_from(
    problem: &NashProblem,
    h: &SpaceTimeField,
    start: Option<&[SpaceTimeField; 2]>,
    opts: &NashOptions,
) -> Result<NashSolution> {
    if !(opts.tol > 0.0) || !(opts.relax > 0.0 && opts.relax <= 1.0) {
        return Err(Error::InvalidInput("Nash tolerance must be positive and relaxation in (0, 1]".into()));
    }
    let grid = &problem.model.grid;
    let mut p = start.cloned().unwrap_or_else(|| [SpaceTimeField::zeros(grid), SpaceTimeField::zeros(grid)]);
    let mut y: Option<SpaceTimeField> = None;
    let mut residuals: Vec<f64> = Vec::new();
    let mut growth = 0usize;
    for it in 0..opts.max_iter {
        let v = [problem.control_from_adjoint(&p[0], 0), problem.control_from_adjoint(&p[1], 1)];
        let state = problem.state(h, [&v[0], &v[1]], y.as_ref())?;
        let coeffs = problem.adjoint_coefficients(&state);
        let (q0, q1) = rayon::join(
            || problem.follower_adjoint(&state, 0, &coeffs),
            || problem.follower_adjoint(&state, 1, &coeffs),
        );
        let q = [q0?, q1?];
        let mut diff = 0.0;
        let mut size = 0.0;
        for i in 0..2 {
            diff += q[i].zip_map(&p[i], |a, b| a - b).norm(grid, None, Levels::Backward).powi(2);
            size += q[i].norm(grid, None, Levels::Backward).powi(2);
        }
        let res = if size > 0.0 { (diff / size).sqrt() } else { diff.sqrt() };
        if !res.is_finite() {
            return Err(Error::Divergence {
                what: "nash",
                iteration: it + 1,
                residual: res,
            });
        }
        if residuals.last().is_some_and(|&last| res > last) {
            growth += 1;
            if growth >= opts.divergence_window {
                return Err(Error::Divergence {
                    what: "nash",
                    iteration: it + 1,
                    residual: res,
                });
            }
        } else {
            growth = 0;
        }
        residuals.push(res);
        let converged = res <= opts.tol;
        for i in 0..2 {
            if converged || opts.relax == 1.0 {
                p[i] = q[i].clone();
            } else {
                let mut next = p[i].scaled(1.0 - opts.relax);
                next.axpy(opts.relax, &q[i]);
                p[i] = next;
            }
        }
        y = Some(state);
        if converged {
            let v = [problem.control_from_adjoint(&p[0], 0), problem.control_from_adjoint(&p[1], 1)];
            let y = problem.state(h, [&v[0], &v[1]], y.as_ref())?;
            return Ok(NashSolution { y, p, v, residuals });
        }
    }
    Err(Error::NonConvergence {
        what: "nash",
        iterations: opts.max_iter,
        residual: residuals.last().copied().unwrap_or(f64::NAN),
    })
}

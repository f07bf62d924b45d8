use super::problem::{Dynamics, NashProblem};
use super::solve::NashOptions;
use crate::domain::{Levels, Region, SpaceTimeField};
use crate::error::{Error, Result};
use crate::solver::{march_backward, march_forward};

/// Solution of the coupled leader adjoint pair
///
/// ```text
/// −ρ_t − (aρ_x)_x + a₁ρ − (βa₂ρ)_x = (α₁ψ¹ + α₂ψ²) χ_{ω_d},  ρ(T) = ρᵀ
///  ψⁱ_t − (aψⁱ_x)_x + b₁ψⁱ + βb₂ψⁱ_x = −ρ χ_{ωᵢ} / μᵢ,        ψⁱ(0) = 0
/// ```
#[derive(Debug, Clone)]
pub struct LeaderAdjoint {
    pub rho: SpaceTimeField,
    pub psi: [SpaceTimeField; 2],
    pub residuals: Vec<f64>,
}

impl NashProblem {
    /// Block iteration for the leader adjoint pair; linear dynamics only.
    pub fn leader_adjoint(&self, terminal: &[f64], opts: &NashOptions) -> Result<LeaderAdjoint> {
        let Dynamics::Linear(c) = &self.dynamics else {
            return Err(Error::InvalidInput("the leader adjoint needs linear dynamics".into()));
        };
        let model = &self.model;
        let grid = &model.grid;
        let rho_coeffs = c.state.adjoint();
        let psi_coeffs = c.follower.adjoint();
        let md = model.mask(Region::Observation);
        let zero = vec![0.0; grid.n() + 1];
        let mut psi = [SpaceTimeField::zeros(grid), SpaceTimeField::zeros(grid)];
        let mut rho = SpaceTimeField::zeros(grid);
        let mut residuals: Vec<f64> = Vec::new();
        let mut growth = 0;
        for it in 0..opts.max_iter {
            let mut src = psi[0].scaled(self.cost.alpha[0]);
            src.axpy(self.cost.alpha[1], &psi[1]);
            let next = march_backward(model, &rho_coeffs, Some(&src.masked(md)), terminal)?;
            let diff = next.zip_map(&rho, |a, b| a - b).norm(grid, None, Levels::Backward);
            let size = next.norm(grid, None, Levels::Backward);
            let res = if size > 0.0 { diff / size } else { diff };
            rho = next;
            let forcing = |i: usize| {
                let mu = self.cost.mu[i];
                rho.masked(model.mask(Region::follower(i))).map(|v| -v / mu)
            };
            let (f0, f1) = (forcing(0), forcing(1));
            let (p0, p1) = rayon::join(
                || march_forward(model, &psi_coeffs, Some(&f0), &zero),
                || march_forward(model, &psi_coeffs, Some(&f1), &zero),
            );
            psi = [p0?, p1?];
            if !res.is_finite() {
                return Err(Error::Divergence {
                    what: "leader adjoint",
                    iteration: it + 1,
                    residual: res,
                });
            }
            if residuals.last().is_some_and(|&l| res > l) {
                growth += 1;
                if growth >= opts.divergence_window {
                    return Err(Error::Divergence {
                        what: "leader adjoint",
                        iteration: it + 1,
                        residual: res,
                    });
                }
            } else {
                growth = 0;
            }
            residuals.push(res);
            if res <= opts.tol {
                return Ok(LeaderAdjoint { rho, psi, residuals });
            }
        }
        Err(Error::NonConvergence {
            what: "leader adjoint",
            iterations: opts.max_iter,
            residual: residuals.last().copied().unwrap_or(f64::NAN),
        })
    }
}

use crate::domain::{Grid, Levels, Model, Region, SpaceTimeField};
use crate::error::{Error, Result};

/// Follower tracking weights, control penalties and targets.
#[derive(Debug, Clone, PartialEq)]
pub struct CostConfig {
    pub alpha: [f64; 2],
    pub mu: [f64; 2],
    pub targets: [SpaceTimeField; 2],
}

impl CostConfig {
    /// Validates `αᵢ ≥ 0`, `μᵢ > 0` and that targets vanish off `ω_d`.
    pub fn new(model: &Model, alpha: [f64; 2], mu: [f64; 2], targets: [SpaceTimeField; 2]) -> Result<Self> {
        for i in 0..2 {
            if !(alpha[i] >= 0.0 && alpha[i].is_finite()) {
                return Err(Error::config(format!("cost.alpha{}", i + 1), "must be finite and non-negative"));
            }
            if !(mu[i] > 0.0 && mu[i].is_finite()) {
                return Err(Error::config(format!("cost.mu{}", i + 1), "must be finite and positive"));
            }
            if !targets[i].fits(&model.grid) || !targets[i].is_finite() {
                return Err(Error::config(format!("cost.target{}", i + 1), "not a finite field on the grid"));
            }
            let mask = model.mask(Region::Observation);
            for k in 0..targets[i].rows() {
                if targets[i].row(k).iter().zip(mask).any(|(v, m)| *m == 0.0 && *v != 0.0) {
                    return Err(Error::config(format!("cost.target{}", i + 1), "target must vanish outside ω_d"));
                }
            }
        }
        Ok(CostConfig { alpha, mu, targets })
    }

    /// Zero targets.
    pub fn tracking_zero(model: &Model, alpha: [f64; 2], mu: [f64; 2]) -> Result<Self> {
        let z = SpaceTimeField::zeros(&model.grid);
        CostConfig::new(model, alpha, mu, [z.clone(), z])
    }

    pub fn symmetric(&self) -> bool {
        self.alpha[0] == self.alpha[1] && self.mu[0] == self.mu[1] && self.targets[0] == self.targets[1]
    }

    /// `Jᵢ = αᵢ/2 ‖y − y_{i,d}‖²_{ω_d} + μᵢ/2 ‖vⁱ‖²_{ωᵢ}` for a given state.
    pub fn value(&self, model: &Model, i: usize, y: &SpaceTimeField, v: &SpaceTimeField) -> f64 {
        let grid = &model.grid;
        let tracking = y
            .zip_map(&self.targets[i], |a, b| a - b)
            .norm(grid, Some(model.mask(Region::Observation)), Levels::Forward)
            .powi(2);
        let control = v.norm(grid, Some(model.mask(Region::follower(i))), Levels::Backward).powi(2);
        0.5 * self.alpha[i] * tracking + 0.5 * self.mu[i] * control
    }

    pub fn target_norms(&self, grid: &Grid) -> [f64; 2] {
        [
            self.targets[0].norm(grid, None, Levels::Forward),
            self.targets[1].norm(grid, None, Levels::Forward),
        ]
    }
}

//! Carleman weight functions, their parameter constraints and orderings,
//! and empirical observability experiments for the coupled adjoint system.
//!
//! The weights reach magnitudes like `e^{-10⁵}`, so every weighted integral
//! is carried as a logarithm.

mod functional;
mod observability;
mod sigma;
mod weights;

pub use functional::{
    admissibility, carleman_functional, carleman_functional_k, is_admissible, log_sum_exp, weighted_observation, LogValue,
    ADMISSIBILITY_LIMIT,
};
pub use observability::{
    carleman_ratio_experiment, observability_experiment, random_terminal, ObservabilitySample, ObservabilityStats,
};
pub use sigma::{build_sigma, Sigma};
pub use weights::{
    check_weight_ordering, select_parameters, CarlemanParameters, CarlemanWeights, ModifiedWeights, OrderingReport,
    WeightValues,
};

use crate::domain::{Interval, Model, Region};
use crate::error::{Error, Result};

/// Carleman settings as they appear in a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlemanSettings {
    pub o0: Interval,
    pub o1: Interval,
    pub sigma_power: u32,
    pub safety: f64,
    pub s_bar: f64,
}

impl Default for CarlemanSettings {
    fn default() -> Self {
        CarlemanSettings {
            o0: Interval::new(0.48, 0.52),
            o1: Interval::new(0.46, 0.64),
            sigma_power: 1,
            safety: 1.0,
            s_bar: 5.0,
        }
    }
}

/// Builds `σ`, selects `(r, d, λ)` and assembles the weights for `model`.
pub fn build_weights(model: &Model, settings: &CarlemanSettings) -> Result<CarlemanWeights> {
    let l = &model.layout;
    let (lead, obs) = (l.interval(Region::Leader), l.interval(Region::Observation));
    let overlap = Interval::new(lead.lo.max(obs.lo), lead.hi.min(obs.hi));
    if overlap.is_empty() {
        return Err(Error::config("regions", "violates ω_d∩ω≠∅"));
    }
    let sigma = build_sigma(settings.o0, settings.o1, overlap, &model.grid, settings.sigma_power)?;
    let params = select_parameters(&sigma, &model.diffusion, settings.safety)?;
    CarlemanWeights::new(
        sigma,
        settings.o0,
        settings.o1,
        params,
        model.diffusion.clone(),
        model.grid.horizon(),
        settings.s_bar,
    )
}

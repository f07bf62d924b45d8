use super::functional::{carleman_functional, log_sum_exp, weighted_observation, LogValue};
use super::weights::CarlemanWeights;
use crate::domain::{row_norm, Grid, Levels, Model, Region, SpaceTimeField};
use crate::error::Result;
use crate::nash::{NashOptions, NashProblem};
use crate::solver::{march_backward, DriftForm, LinearCoefficients};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// Gaussian nodal samples, one damped Jacobi pass, zero endpoints. The
/// stream is `(seed, index)`, so samples do not depend on evaluation order.
pub fn random_terminal(grid: &Grid, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let n = grid.n();
    let raw: Vec<f64> = (0..=n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut out = vec![0.0; n + 1];
    for j in 1..n {
        let left = if j > 1 { raw[j - 1] } else { 0.0 };
        let right = if j + 1 < n { raw[j + 1] } else { 0.0 };
        out[j] = 0.25 * left + 0.5 * raw[j] + 0.25 * right;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ObservabilitySample {
    pub index: u64,
    /// `‖ρ(0)‖²`.
    pub initial_energy: f64,
    /// `ln Σᵢ ∫ κ² |ψⁱ|²`; `-∞` when `κ` underflows everywhere.
    pub ln_kappa_term: f64,
    /// `∫∫_ω |ρ|²`.
    pub observation: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ObservabilityStats {
    pub samples: Vec<ObservabilitySample>,
    pub failures: usize,
    pub max_ratio: f64,
    pub median_ratio: f64,
}

fn kappa_term(model: &Model, w: &CarlemanWeights, psi: &[SpaceTimeField; 2]) -> f64 {
    let grid = &model.grid;
    let x = grid.nodes();
    let sw = grid.space_weights();
    let mut terms = Vec::new();
    for p in psi {
        for k in 1..=grid.m() {
            let lk = w.log_kappa(grid.times()[k], x);
            for (j, &v) in p.row(k).iter().enumerate() {
                let q = grid.dt(k) * sw[j] * v * v;
                if q > 0.0 {
                    terms.push(q.ln() + 2.0 * lk);
                }
            }
        }
    }
    log_sum_exp(&terms)
}

fn one_sample(problem: &NashProblem, w: &CarlemanWeights, seed: u64, index: u64, opts: &NashOptions) -> Result<ObservabilitySample> {
    let model = &problem.model;
    let grid = &model.grid;
    let terminal = random_terminal(grid, seed, index);
    let adj = problem.leader_adjoint(&terminal, opts)?;
    let initial_energy = row_norm(grid, adj.rho.row(0)).powi(2);
    let ln_kappa_term = kappa_term(model, w, &adj.psi);
    let observation = adj.rho.norm(grid, Some(model.mask(Region::Leader)), Levels::Backward).powi(2);
    let lhs = initial_energy + ln_kappa_term.exp();
    Ok(ObservabilitySample {
        index,
        initial_energy,
        ln_kappa_term,
        observation,
        ratio: lhs / observation,
    })
}

/// Empirical constant of the observability inequality over random
/// terminal data. Samples run in parallel.
pub fn observability_experiment(
    w: &CarlemanWeights,
    problem: &NashProblem,
    n_samples: usize,
    seed: u64,
    opts: &NashOptions,
) -> ObservabilityStats {
    if problem.cost.mu.iter().any(|&m| m < 1.0) {
        log::warn!("observability experiment with small penalties μ = {:?}", problem.cost.mu);
    }
    let results: Vec<Result<ObservabilitySample>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| one_sample(problem, w, seed, i, opts))
        .collect();
    let mut samples = Vec::new();
    let mut failures = 0;
    for r in results {
        match r {
            Ok(s) if s.ratio.is_finite() => samples.push(s),
            Ok(s) if s.observation == 0.0 && s.initial_energy == 0.0 => {}
            _ => failures += 1,
        }
    }
    let mut ratios: Vec<f64> = samples.iter().map(|s| s.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let max_ratio = ratios.last().copied().unwrap_or(f64::NAN);
    let median_ratio = if ratios.is_empty() {
        f64::NAN
    } else if ratios.len() % 2 == 1 {
        ratios[ratios.len() / 2]
    } else {
        0.5 * (ratios[ratios.len() / 2 - 1] + ratios[ratios.len() / 2])
    };
    ObservabilityStats {
        samples,
        failures,
        max_ratio,
        median_ratio,
    }
}

/// `ln ℐ(z) − ln ∫∫_{O₁} z² e^{2sφ}` for solutions of
/// `−z_t − (a z_x)_x = 0` with random terminal data.
pub fn carleman_ratio_experiment(model: &Model, w: &CarlemanWeights, s: f64, n_samples: usize, seed: u64) -> Result<Vec<f64>> {
    let coeffs = LinearCoefficients::zero(&model.grid, DriftForm::Divergence);
    let mask = w.o1.mask(&model.grid);
    (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let terminal = random_terminal(&model.grid, seed, i);
            let z = march_backward(model, &coeffs, None, &terminal)?;
            let lhs: LogValue = carleman_functional(model, &z, w, s);
            let rhs = weighted_observation(model, &z, w, s, &mask);
            Ok(lhs.ln - rhs.ln)
        })
        .collect()
}

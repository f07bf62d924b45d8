//! The default desk-scale configuration shared by the CLI, the FFI layer
//! and the tests.

use crate::domain::{build_grid, Grading, Model};
use crate::error::Result;
use crate::nash::{CostConfig, Dynamics, NashProblem};
use crate::nonlinear::{PicardOptions, TanhSin};
use crate::solver::CoupledCoefficients;
use std::sync::Arc;

pub const A1: f64 = 0.5;
pub const A2: f64 = 0.1;
pub const ALPHA: f64 = 1.0;
pub const MU: f64 = 100.0;

/// `a = x^{1/2}`, `β = x`, default regions, `T = 1`, uniform grid.
pub fn model(n: usize, m: usize) -> Result<Model> {
    Model::default_on(build_grid(n, m, 1.0, Grading::Uniform)?)
}

/// `y⁰ = sin(πx)`.
pub fn initial_datum(model: &Model) -> Vec<f64> {
    let n = model.grid.n();
    let mut y0: Vec<f64> = model.grid.nodes().iter().map(|&x| (std::f64::consts::PI * x).sin()).collect();
    y0[0] = 0.0;
    y0[n] = 0.0;
    y0
}

/// `a₁ = b₁ = 0.5`, `a₂ = b₂ = 0.1`.
pub fn linear_coefficients(model: &Model) -> CoupledCoefficients {
    CoupledCoefficients::constant(model, A1, A2, A1, A2)
}

/// `α = 1`, `μ = 100`, zero targets.
pub fn cost(model: &Model) -> Result<CostConfig> {
    CostConfig::tracking_zero(model, [ALPHA; 2], [MU; 2])
}

pub fn linear_problem(n: usize, m: usize) -> Result<NashProblem> {
    let model = model(n, m)?;
    let dynamics = Dynamics::Linear(linear_coefficients(&model));
    let cost = cost(&model)?;
    let y0 = initial_datum(&model);
    NashProblem::new(model, dynamics, cost, y0)
}

/// Same with `F(s, p) = 0.5 tanh(s) + 0.1 sin(p)`.
pub fn semilinear_problem(n: usize, m: usize) -> Result<NashProblem> {
    let model = model(n, m)?;
    let dynamics = Dynamics::Semilinear {
        nl: Arc::new(TanhSin::default()),
        picard: PicardOptions::default(),
    };
    let cost = cost(&model)?;
    let y0 = initial_datum(&model);
    NashProblem::new(model, dynamics, cost, y0)
}

use super::weights::CarlemanWeights;
use crate::domain::{Interval, Model, SpaceTimeField};

/// `ln Σ exp(lᵢ)` without overflow; `-∞` for an empty or all-zero sum.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    max + terms.iter().map(|&l| (l - max).exp()).sum::<f64>().ln()
}

/// A non-negative quantity stored through its logarithm.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LogValue {
    pub ln: f64,
}

impl LogValue {
    pub fn value(&self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(&self) -> bool {
        self.ln == f64::NEG_INFINITY
    }
}

fn push(terms: &mut Vec<f64>, weight: f64, exponent: f64) {
    if weight > 0.0 {
        terms.push(weight.ln() + exponent);
    }
}

/// `ℐ(z) = ∫_Q (s³Θ³ x²/a z² + sΘ a z_x²) e^{2sφ}`.
///
/// The zeroth-order term is taken at nodes, the gradient term at cell
/// midpoints; levels `t = 0, T` carry zero weight since `e^{2sφ}` vanishes
/// there.
pub fn carleman_functional(model: &Model, z: &SpaceTimeField, w: &CarlemanWeights, s: f64) -> LogValue {
    let grid = &model.grid;
    let x = grid.nodes();
    let n = grid.n();
    let sw = grid.space_weights();
    let a = &model.diffusion;
    let am = model.a_mid();
    let mut terms = Vec::new();
    let times = grid.times();
    for k in 1..grid.m() {
        let t = times[k];
        let dt = grid.dt(k);
        let th = w.theta(t);
        let row = z.row(k);
        for j in 1..n {
            let coef = s.powi(3) * th.powi(3) * x[j] * x[j] / a.eval(x[j]);
            push(&mut terms, dt * sw[j] * coef * row[j] * row[j], 2.0 * s * th * w.delta(x[j]));
        }
        for j in 0..n {
            let h = x[j + 1] - x[j];
            let g = (row[j + 1] - row[j]) / h;
            let xm = grid.midpoint(j);
            push(&mut terms, dt * h * s * th * am[j] * g * g, 2.0 * s * th * w.delta(xm));
        }
    }
    LogValue { ln: log_sum_exp(&terms) }
}

/// `𝒦(z) = ∫_{(0,T)×b} (s³η³z² + sη z_x²) e^{2sΦ}` over the subinterval `b`.
pub fn carleman_functional_k(model: &Model, z: &SpaceTimeField, w: &CarlemanWeights, s: f64, b: Interval) -> LogValue {
    let grid = &model.grid;
    let x = grid.nodes();
    let n = grid.n();
    let sw = grid.space_weights();
    let r = w.params.r;
    let mut terms = Vec::new();
    let times = grid.times();
    for k in 1..grid.m() {
        let t = times[k];
        let dt = grid.dt(k);
        let th = w.theta(t);
        let row = z.row(k);
        for j in 1..n {
            if b.contains(x[j]) {
                let eta = th * (r * w.sigma.eval(x[j])).exp();
                push(&mut terms, dt * sw[j] * s.powi(3) * eta.powi(3) * row[j] * row[j], 2.0 * s * th * w.psi(x[j]));
            }
        }
        for j in 0..n {
            let xm = grid.midpoint(j);
            if b.contains(x[j]) && b.contains(x[j + 1]) {
                let h = x[j + 1] - x[j];
                let g = (row[j + 1] - row[j]) / h;
                let eta = th * (r * w.sigma.eval(xm)).exp();
                push(&mut terms, dt * h * s * eta * g * g, 2.0 * s * th * w.psi(xm));
            }
        }
    }
    LogValue { ln: log_sum_exp(&terms) }
}

/// `∫_Q |z|² e^{2sφ}` restricted to a node mask.
pub fn weighted_observation(model: &Model, z: &SpaceTimeField, w: &CarlemanWeights, s: f64, mask: &[f64]) -> LogValue {
    let grid = &model.grid;
    let x = grid.nodes();
    let sw = grid.space_weights();
    let mut terms = Vec::new();
    for k in 1..grid.m() {
        let t = grid.times()[k];
        let th = w.theta(t);
        let row = z.row(k);
        for j in 0..=grid.n() {
            push(&mut terms, grid.dt(k) * sw[j] * mask[j] * row[j] * row[j], 2.0 * s * th * w.delta(x[j]));
        }
    }
    LogValue { ln: log_sum_exp(&terms) }
}

/// Threshold on `∫∫ κ^{-2}|y_d|²` above which a target is rejected.
pub const ADMISSIBILITY_LIMIT: f64 = 1e12;

/// `∫₀ᵀ∫_{ω_d} κ^{-2} |y_d|²`, in log form.
pub fn admissibility(model: &Model, target: &SpaceTimeField, w: &CarlemanWeights) -> LogValue {
    let grid = &model.grid;
    let x = grid.nodes();
    let sw = grid.space_weights();
    let mask = model.mask(crate::domain::Region::Observation);
    let mut terms = Vec::new();
    for k in 1..=grid.m() {
        let t = grid.times()[k];
        let lk = w.log_kappa(t, x);
        let row = target.row(k);
        for j in 0..=grid.n() {
            let v = grid.dt(k) * sw[j] * mask[j] * row[j] * row[j];
            if v > 0.0 {
                terms.push(v.ln() - 2.0 * lk);
            }
        }
    }
    LogValue { ln: log_sum_exp(&terms) }
}

/// True when the target passes the finite-quadrature check.
pub fn is_admissible(model: &Model, target: &SpaceTimeField, w: &CarlemanWeights) -> bool {
    admissibility(model, target, w).ln <= ADMISSIBILITY_LIMIT.ln()
}

use super::cg::{minimize_cg, HumResult};
use super::penalized::HumConfig;
use crate::error::{Error, Result};
use crate::nash::NashProblem;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub y_final_norm: f64,
    pub h_norm: f64,
    pub cg_iterations: usize,
    pub converged: bool,
    /// Least-squares slope of `ln ‖y_ε(T)‖` against `ln ε` over rows so far.
    pub running_slope: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub slope: f64,
    /// `max ‖h_ε‖ / min ‖h_ε‖` across the sweep.
    pub h_ratio: f64,
    pub results: Vec<HumResult>,
}

/// Least-squares slope of `ln y` against `ln x`; NaN with fewer than two
/// points or any non-positive value.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    if x.len() < 2 || x.len() != y.len() || x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return f64::NAN;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        f64::NAN
    }
}

/// Minimizes `J_ε` for each `ε` in `cfg.epsilon_list`, warm-starting each
/// solve from the previous leader control.
pub fn epsilon_sweep(problem: &NashProblem, cfg: &HumConfig) -> Result<SweepResult> {
    cfg.validate()?;
    if cfg.epsilon_list.is_empty() {
        return Err(Error::config("hum.epsilon_list", "must not be empty"));
    }
    let mut rows = Vec::with_capacity(cfg.epsilon_list.len());
    let mut results: Vec<HumResult> = Vec::with_capacity(cfg.epsilon_list.len());
    for &eps in &cfg.epsilon_list {
        let warm = results.last().map(|r| &r.h);
        let res = minimize_cg(problem, &cfg.with_epsilon(eps), warm)?;
        log::info!(
            "ε = {eps:e}: ‖y(T)‖ = {:e}, ‖h‖ = {:e}, {} CG steps",
            res.y_final_norm,
            res.h_norm,
            res.iterations
        );
        results.push(res);
        let xs: Vec<f64> = results.iter().map(|r| r.epsilon).collect();
        let ys: Vec<f64> = results.iter().map(|r| r.y_final_norm).collect();
        let last = results.last().expect("just pushed");
        rows.push(SweepRow {
            epsilon: eps,
            y_final_norm: last.y_final_norm,
            h_norm: last.h_norm,
            cg_iterations: last.iterations,
            converged: last.converged,
            running_slope: log_log_slope(&xs, &ys),
        });
    }
    let slope = rows.last().map_or(f64::NAN, |r| r.running_slope);
    let hmax = rows.iter().map(|r| r.h_norm).fold(0.0, f64::max);
    let hmin = rows.iter().map(|r| r.h_norm).fold(f64::INFINITY, f64::min);
    let h_ratio = if hmin > 0.0 { hmax / hmin } else { f64::NAN };
    Ok(SweepResult {
        rows,
        slope,
        h_ratio,
        results,
    })
}

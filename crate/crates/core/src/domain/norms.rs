use super::coefficient::DegenerateCoefficient;
use super::grid::Grid;
use crate::error::{Error, Result};

const ENDPOINT_TOL: f64 = 1e-12;

/// `‖u‖²_{L²} + ‖√a u_x‖²_{L²}` for a node row vanishing at both ends.
///
/// The `L²` part uses the trapezoidal rule, the gradient part the midpoint
/// rule with `a` sampled at cell midpoints.
pub fn weighted_h1a_norm_sq(grid: &Grid, u: &[f64], a: &DegenerateCoefficient) -> Result<f64> {
    let n = grid.n();
    if u.len() != n + 1 {
        return Err(Error::InvalidInput(format!(
            "row has {} samples, grid has {} nodes",
            u.len(),
            n + 1
        )));
    }
    let scale = u.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if u[0].abs() > ENDPOINT_TOL * scale || u[n].abs() > ENDPOINT_TOL * scale {
        return Err(Error::InvalidInput(format!(
            "H¹_a norm needs u(0) = u(1) = 0, got {:e} and {:e}",
            u[0], u[n]
        )));
    }
    let l2: f64 = grid
        .space_weights()
        .iter()
        .zip(u)
        .map(|(w, v)| w * v * v)
        .sum();
    Ok(l2 + gradient_energy(grid, u, a))
}

pub fn weighted_h1a_norm(grid: &Grid, u: &[f64], a: &DegenerateCoefficient) -> Result<f64> {
    weighted_h1a_norm_sq(grid, u, a).map(f64::sqrt)
}

/// Midpoint-rule `∫ a |u_x|²`.
pub fn gradient_energy(grid: &Grid, u: &[f64], a: &DegenerateCoefficient) -> f64 {
    (0..grid.n())
        .map(|j| {
            let h = grid.cell_width(j);
            let du = u[j + 1] - u[j];
            a.eval(grid.midpoint(j)) * du * du / h
        })
        .sum()
}

/// `∫ a/x² |z|² / ∫ a |z'|²` under a shared midpoint rule, so the singular
/// integrand is never evaluated at `x = 0`.
pub fn hardy_ratio(grid: &Grid, z: &[f64], a: &DegenerateCoefficient) -> Result<f64> {
    let n = grid.n();
    if z.len() != n + 1 {
        return Err(Error::InvalidInput("row length does not match the grid".into()));
    }
    let scale = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if z[0].abs() > ENDPOINT_TOL * scale.max(1.0) {
        return Err(Error::InvalidInput(format!("Hardy ratio needs z(0) = 0, got {:e}", z[0])));
    }
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for j in 0..n {
        let h = grid.cell_width(j);
        let m = grid.midpoint(j);
        let am = a.eval(m);
        let zm = 0.5 * (z[j] + z[j + 1]);
        let dz = (z[j + 1] - z[j]) / h;
        lhs += h * am / (m * m) * zm * zm;
        rhs += h * am * dz * dz;
    }
    if rhs <= 0.0 {
        return Err(Error::InvalidInput("Hardy ratio of an identically zero function".into()));
    }
    Ok(lhs / rhs)
}

/// The Hardy–Poincaré constant `4 / (1 - θ)²` for `a = x^θ`.
pub fn hardy_constant(theta: f64) -> f64 {
    4.0 / ((1.0 - theta) * (1.0 - theta))
}

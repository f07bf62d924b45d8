use crate::domain::{Grid, Interval};
use crate::error::{Error, Result};

/// `σ(x) = (g(x)(1 − g(x)))^m` with the monotone remap
/// `g(x) = x + c·x(1 − x)` placing the unique critical point at `x*`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Sigma {
    pub m: u32,
    pub x_star: f64,
    c: f64,
}

impl Sigma {
    pub fn new(x_star: f64, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::config("carleman.sigma_power", "must be at least 1"));
        }
        if !(x_star > 0.0 && x_star < 1.0) {
            return Err(Error::config("carleman.o0", "critical point must lie in (0, 1)"));
        }
        let c = (0.5 - x_star) / (x_star * (1.0 - x_star));
        // g' = 1 + c(1 − 2x) > 0 on [0, 1] iff |c| < 1.
        if c.abs() >= 1.0 {
            return Err(Error::config(
                "carleman.o0",
                format!("critical point {x_star} is not capturable by a monotone remap; keep it in (0.293, 0.707)"),
            ));
        }
        Ok(Sigma { m, x_star, c })
    }

    fn g(&self, x: f64) -> f64 {
        x + self.c * x * (1.0 - x)
    }

    fn dg(&self, x: f64) -> f64 {
        1.0 + self.c * (1.0 - 2.0 * x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let g = self.g(x);
        (g * (1.0 - g)).powi(self.m as i32)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let g = self.g(x);
        let m = self.m as i32;
        m as f64 * (g * (1.0 - g)).powi(m - 1) * (1.0 - 2.0 * g) * self.dg(x)
    }

    /// `‖σ‖_∞ = 4^{-m}`, attained at `x*`.
    pub fn sup(&self) -> f64 {
        0.25_f64.powi(self.m as i32)
    }
}

/// Builds `σ` with its critical point at the midpoint of `O₀` and checks
/// `O₀ ⋐ O₁ ⊆ ω_d ∩ ω` as well as the sign conditions on `grid`.
pub fn build_sigma(o0: Interval, o1: Interval, overlap: Interval, grid: &Grid, m: u32) -> Result<Sigma> {
    if o0.is_empty() || o0.len() <= 0.0 {
        return Err(Error::config("carleman.o0", "O₀ is empty"));
    }
    if !(o1.lo < o0.lo && o0.hi < o1.hi) {
        return Err(Error::config("carleman.o0", "O₀ must be compactly contained in O₁"));
    }
    if !(overlap.lo <= o1.lo && o1.hi <= overlap.hi) {
        return Err(Error::config("carleman.o1", "O₁ must lie inside ω_d ∩ ω"));
    }
    let sigma = Sigma::new(o0.midpoint(), m)?;
    let x = grid.nodes();
    let n = grid.n();
    if sigma.eval(0.0) != 0.0 || sigma.eval(1.0) != 0.0 {
        return Err(Error::InvalidInput("σ does not vanish at the endpoints".into()));
    }
    for &xj in &x[1..n] {
        if !(sigma.eval(xj) > 0.0) {
            return Err(Error::InvalidInput(format!("σ is not positive at x = {xj}")));
        }
    }
    // σ_x vanishes at the endpoints when m > 1; the condition is checked on
    // the interior nodes then.
    let range = if m == 1 { 0..=n } else { 1..=n - 1 };
    for j in range {
        if !o0.contains(x[j]) && sigma.deriv(x[j]) == 0.0 {
            return Err(Error::InvalidInput(format!("σ_x vanishes at x = {} outside O₀", x[j])));
        }
    }
    Ok(sigma)
}

use super::sigma::Sigma;
use crate::domain::{DegenerateCoefficient, Grid, Interval};
use crate::error::{Error, Result};
use crate::nonlinear::gauss_legendre;

/// `r`, `d`, `λ` and the admissible interval `I` for `λ`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CarlemanParameters {
    pub r: f64,
    pub d: f64,
    pub lambda: f64,
    pub interval: (f64, f64),
}

/// `r = safety·4 ln 2/‖σ‖_∞`, `d = safety·5/(a(1)(2 − τ))` and `λ` the
/// midpoint of `I`.
pub fn select_parameters(sigma: &Sigma, a: &DegenerateCoefficient, safety: f64) -> Result<CarlemanParameters> {
    if !(safety >= 1.0) {
        return Err(Error::config("carleman.safety", "must be at least 1"));
    }
    let s = sigma.sup();
    let r = safety * 4.0 * std::f64::consts::LN_2 / s;
    let k = a.eval(1.0) * (2.0 - a.tau());
    let d = safety * 5.0 / k;
    let (lo, hi) = lambda_interval(s, r, d, k);
    if !(lo <= hi) {
        return Err(Error::EmptyInterval { lower: lo, upper: hi });
    }
    Ok(CarlemanParameters {
        r,
        d,
        lambda: 0.5 * (lo + hi),
        interval: (lo, hi),
    })
}

fn lambda_interval(s: f64, r: f64, d: f64, k: f64) -> (f64, f64) {
    let e1 = (r * s).exp();
    let e2 = (2.0 * r * s).exp();
    (k * (e2 - 1.0) / (d * k - 1.0), 4.0 * (e2 - e1) / (3.0 * d))
}

/// Pointwise values of the Carleman weights.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct WeightValues {
    pub theta: f64,
    pub delta: f64,
    pub phi: f64,
    pub eta: f64,
    pub psi: f64,
    pub big_phi: f64,
}

/// The weight family `Θ, δ, φ, η, Ψ, Φ` and its modified versions.
#[derive(Debug, Clone)]
pub struct CarlemanWeights {
    pub sigma: Sigma,
    pub o0: Interval,
    pub o1: Interval,
    pub params: CarlemanParameters,
    pub s_bar: f64,
    pub horizon: f64,
    a: DegenerateCoefficient,
}

impl CarlemanWeights {
    pub fn new(
        sigma: Sigma,
        o0: Interval,
        o1: Interval,
        params: CarlemanParameters,
        a: DegenerateCoefficient,
        horizon: f64,
        s_bar: f64,
    ) -> Result<Self> {
        if !(s_bar > 0.0) {
            return Err(Error::config("carleman.s_bar", "must be positive"));
        }
        Ok(CarlemanWeights {
            sigma,
            o0,
            o1,
            params,
            s_bar,
            horizon,
            a,
        })
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        let mut w = self.clone();
        w.params.lambda = lambda;
        w
    }

    /// `Θ(t) = (t(T − t))^{-4}`; infinite at `t ∈ {0, T}`.
    pub fn theta(&self, t: f64) -> f64 {
        let q = t * (self.horizon - t);
        if q <= 0.0 {
            f64::INFINITY
        } else {
            q.powi(-4)
        }
    }

    /// `∫₀ˣ y / a(y) dy`.
    pub fn primitive(&self, x: f64) -> f64 {
        if let Some(v) = self.a.primitive_x_over_a(x) {
            return v;
        }
        let (nodes, weights) = gauss_legendre(16);
        let panels = 32;
        let h = x / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = p as f64 * h;
            for (&u, &w) in nodes.iter().zip(&weights) {
                let y = lo + h * u;
                total += h * w * y / self.a.eval(y);
            }
        }
        total
    }

    pub fn delta(&self, x: f64) -> f64 {
        self.params.lambda * (self.primitive(x) - self.params.d)
    }

    /// `Ψ(x) = e^{rσ(x)} − e^{2r‖σ‖_∞}`.
    pub fn psi(&self, x: f64) -> f64 {
        let r = self.params.r;
        (r * self.sigma.eval(x)).exp() - (2.0 * r * self.sigma.sup()).exp()
    }

    pub fn eval(&self, t: f64, x: f64) -> Result<WeightValues> {
        if !(t > 0.0 && t < self.horizon) {
            return Err(Error::InvalidInput(format!("Θ is singular at t = {t}")));
        }
        let theta = self.theta(t);
        let delta = self.delta(x);
        let psi = self.psi(x);
        Ok(WeightValues {
            theta,
            delta,
            phi: theta * delta,
            eta: theta * (self.params.r * self.sigma.eval(x)).exp(),
            psi,
            big_phi: theta * psi,
        })
    }

    /// `Θ̃(t)`: frozen at `Θ(T/2)` on `[0, T/2]`.
    pub fn theta_tilde(&self, t: f64) -> f64 {
        self.theta(t.max(0.5 * self.horizon))
    }

    /// `φ̃(t, x)`.
    pub fn phi_tilde(&self, t: f64, x: f64) -> f64 {
        self.theta_tilde(t) * self.delta(x)
    }

    /// `φ̂(t) = min_x φ̃(t, x)` over the given nodes.
    pub fn phi_hat(&self, t: f64, nodes: &[f64]) -> f64 {
        let dmin = nodes.iter().map(|&x| self.delta(x)).fold(f64::INFINITY, f64::min);
        let th = self.theta_tilde(t);
        if th.is_infinite() {
            f64::NEG_INFINITY
        } else {
            th * dmin
        }
    }

    /// `ln κ(t) = s̄ φ̂(t)`; `κ` itself underflows for realistic `s̄`.
    pub fn log_kappa(&self, t: f64, nodes: &[f64]) -> f64 {
        self.s_bar * self.phi_hat(t, nodes)
    }

    pub fn kappa(&self, t: f64, nodes: &[f64]) -> f64 {
        self.log_kappa(t, nodes).exp()
    }

    /// `(φ̃(t,·), Θ̃(t), φ̂(t), κ(t))` on the grid nodes.
    pub fn modified_weights(&self, t: f64, grid: &Grid) -> ModifiedWeights {
        let x = grid.nodes();
        ModifiedWeights {
            phi_tilde: x.iter().map(|&xj| self.phi_tilde(t, xj)).collect(),
            theta_tilde: self.theta_tilde(t),
            phi_hat: self.phi_hat(t, x),
            log_kappa: self.log_kappa(t, x),
            kappa: self.kappa(t, x),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedWeights {
    pub phi_tilde: Vec<f64>,
    pub theta_tilde: f64,
    pub phi_hat: f64,
    pub log_kappa: f64,
    pub kappa: f64,
}

/// Margins of `4/3 Φ ≤ φ ≤ Φ` and `2Φ ≤ φ`, and the sign conditions.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OrderingReport {
    /// `min (Φ − φ)`.
    pub upper_margin: f64,
    /// `min (φ − 4/3 Φ)`.
    pub lower_margin: f64,
    /// `min (φ − 2Φ)`.
    pub double_margin: f64,
    pub max_delta: f64,
    pub max_psi: f64,
    pub nodes_checked: usize,
}

impl OrderingReport {
    pub fn pass(&self) -> bool {
        self.upper_margin >= 0.0 && self.lower_margin >= 0.0 && self.double_margin >= 0.0 && self.max_delta < 0.0 && self.max_psi < 0.0
    }
}

/// Scans every interior time level and every node. Margins are reported
/// relative to `Θ(t)` so that levels near `0` and `T` do not dominate.
pub fn check_weight_ordering(w: &CarlemanWeights, grid: &Grid) -> Result<OrderingReport> {
    let mut rep = OrderingReport {
        upper_margin: f64::INFINITY,
        lower_margin: f64::INFINITY,
        double_margin: f64::INFINITY,
        max_delta: f64::NEG_INFINITY,
        max_psi: f64::NEG_INFINITY,
        nodes_checked: 0,
    };
    let times = grid.times();
    for &t in &times[1..times.len() - 1] {
        for &x in grid.nodes() {
            let v = w.eval(t, x)?;
            rep.upper_margin = rep.upper_margin.min((v.big_phi - v.phi) / v.theta);
            rep.lower_margin = rep.lower_margin.min((v.phi - 4.0 / 3.0 * v.big_phi) / v.theta);
            rep.double_margin = rep.double_margin.min((v.phi - 2.0 * v.big_phi) / v.theta);
            rep.max_delta = rep.max_delta.max(v.delta);
            rep.max_psi = rep.max_psi.max(v.psi);
            rep.nodes_checked += 1;
        }
    }
    Ok(rep)
}

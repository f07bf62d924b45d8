use std::fmt;
use std::sync::Arc;

use super::grid::Grid;
use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    /// `a(x) = x^alpha`
    Power { alpha: f64 },
    Custom { name: String, a: ScalarFn, da: ScalarFn },
}

/// Diffusion coefficient `a(x)` vanishing at the left endpoint.
#[derive(Clone)]
pub struct DegenerateCoefficient {
    shape: Shape,
    tau: f64,
}

impl fmt::Debug for DegenerateCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.shape {
            Shape::Power { alpha } => write!(f, "x^{alpha} (tau={})", self.tau),
            Shape::Custom { name, .. } => write!(f, "{name} (tau={})", self.tau),
        }
    }
}

impl DegenerateCoefficient {
    /// `a(x) = x^alpha` with the exact sector constant `tau = alpha`.
    pub fn power(alpha: f64) -> Self {
        DegenerateCoefficient {
            shape: Shape::Power { alpha },
            tau: alpha,
        }
    }

    pub fn custom(
        name: impl Into<String>,
        a: impl Fn(f64) -> f64 + Send + Sync + 'static,
        da: impl Fn(f64) -> f64 + Send + Sync + 'static,
        tau: f64,
    ) -> Self {
        DegenerateCoefficient {
            shape: Shape::Custom {
                name: name.into(),
                a: Arc::new(a),
                da: Arc::new(da),
            },
            tau,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Power { alpha } => {
                if x == 0.0 {
                    0.0
                } else {
                    x.powf(*alpha)
                }
            }
            Shape::Custom { a, .. } => a(x),
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Power { alpha } => alpha * x.powf(alpha - 1.0),
            Shape::Custom { da, .. } => da(x),
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn alpha_exp(&self) -> Option<f64> {
        match self.shape {
            Shape::Power { alpha } => Some(alpha),
            Shape::Custom { .. } => None,
        }
    }

    /// `∫₀ˣ y / a(y) dy` in closed form, when the family has one.
    pub fn primitive_x_over_a(&self, x: f64) -> Option<f64> {
        self.alpha_exp()
            .map(|alpha| x.powf(2.0 - alpha) / (2.0 - alpha))
    }
}

/// Per-clause outcome of the degeneracy hypotheses on the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    pub vanishes_at_origin: bool,
    pub positive_interior: bool,
    pub tau_in_range: bool,
    /// `x a'(x) <= tau a(x)` at every node.
    pub sector_condition: bool,
    /// Largest `x a'(x) - tau a(x)` over the nodes.
    pub worst_sector_excess: f64,
    /// `x² / a(x)` non-decreasing over consecutive nodes.
    pub x2_over_a_monotone: bool,
}

impl DegeneracyReport {
    pub fn pass(&self) -> bool {
        self.vanishes_at_origin
            && self.positive_interior
            && self.tau_in_range
            && self.sector_condition
            && self.x2_over_a_monotone
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.vanishes_at_origin {
            out.push("a(0) = 0");
        }
        if !self.positive_interior {
            out.push("a > 0 on (0,1]");
        }
        if !self.tau_in_range {
            out.push("tau in [0,1)");
        }
        if !self.sector_condition {
            out.push("x a'(x) <= tau a(x)");
        }
        if !self.x2_over_a_monotone {
            out.push("x^2/a(x) non-decreasing");
        }
        out
    }
}

const REL_TOL: f64 = 1e-12;

pub fn validate_degeneracy(a: &DegenerateCoefficient, grid: &Grid) -> DegeneracyReport {
    let nodes = grid.nodes();
    let tau = a.tau();
    let vanishes_at_origin = a.eval(0.0) == 0.0;
    let positive_interior = nodes[1..].iter().all(|&x| a.eval(x) > 0.0);
    let tau_in_range = (0.0..1.0).contains(&tau);

    let mut worst = f64::NEG_INFINITY;
    let mut sector_condition = true;
    for &x in &nodes[1..] {
        let ax = a.eval(x);
        let excess = x * a.deriv(x) - tau * ax;
        worst = worst.max(excess);
        if excess > REL_TOL * ax.abs().max(f64::MIN_POSITIVE) {
            sector_condition = false;
        }
    }

    let ratios: Vec<f64> = nodes[1..].iter().map(|&x| x * x / a.eval(x)).collect();
    let x2_over_a_monotone = ratios
        .windows(2)
        .all(|w| w[1] >= w[0] * (1.0 - REL_TOL));

    DegeneracyReport {
        vanishes_at_origin,
        positive_interior,
        tau_in_range,
        sector_condition,
        worst_sector_excess: worst,
        x2_over_a_monotone,
    }
}

/// The weight `β(x)` in front of the gradient term.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftWeight {
    shape: BetaShape,
    bound: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BetaShape {
    Zero,
    /// `β(x) = x^p`
    Power(f64),
}

impl DriftWeight {
    pub fn zero() -> Self {
        DriftWeight {
            shape: BetaShape::Zero,
            bound: None,
        }
    }

    /// `β(x) = x`
    pub fn identity() -> Self {
        Self::power(1.0)
    }

    pub fn power(p: f64) -> Self {
        DriftWeight {
            shape: BetaShape::Power(p),
            bound: None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.shape {
            BetaShape::Zero => 0.0,
            BetaShape::Power(p) => {
                if x == 0.0 {
                    0.0
                } else {
                    x.powf(p)
                }
            }
        }
    }

    /// The constant `L` with `|β| <= L √a`, once computed by [`beta_bound`].
    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    pub fn with_bound(mut self, l: f64) -> Self {
        self.bound = Some(l);
        self
    }

    /// `sup |β(x)/x|` over the nodes, excluding `x = 0`.
    pub fn ratio_sup(&self, grid: &Grid) -> f64 {
        grid.nodes()[1..]
            .iter()
            .map(|&x| (self.eval(x) / x).abs())
            .fold(0.0, f64::max)
    }
}

/// `L = max |β(x)| / √a(x)` over the interior nodes.
///
/// The ratio is also probed on a geometric sequence towards `x = 0`; if it
/// keeps growing past twice the grid value it is reported as unbounded.
pub fn beta_bound(beta: &DriftWeight, a: &DegenerateCoefficient, grid: &Grid) -> Result<f64> {
    let ratio = |x: f64| beta.eval(x).abs() / a.eval(x).sqrt();
    let nodes = grid.nodes();
    let l = nodes[1..nodes.len() - 1]
        .iter()
        .chain(std::iter::once(&1.0))
        .map(|&x| ratio(x))
        .fold(0.0, f64::max);
    if !l.is_finite() {
        return Err(Error::InvalidInput("|β|/√a is not finite on the grid".into()));
    }
    let x1 = nodes[1];
    let probe = (1..=30)
        .map(|k| ratio(x1 * 0.5f64.powi(k)))
        .fold(0.0, f64::max);
    if probe > 2.0 * l.max(f64::MIN_POSITIVE) && probe > 1e-300 {
        return Err(Error::InvalidInput(format!(
            "|β|/√a grows under refinement towards x=0 ({probe:e} vs {l:e} on the grid)"
        )));
    }
    Ok(l)
}

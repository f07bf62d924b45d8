//! The semilinear term `F(y, y_x)`: derivatives, integral means, frozen
//! coefficients, assumption checks and the Picard solver.

mod assumptions;
mod frozen;
mod picard;
mod quadrature;

pub use assumptions::{validate_assumptions, AssumptionReport, ProbeLattice};
pub use frozen::{derivative_fields, quotient_coefficients, DerivativeFields, FrozenCoefficients};
pub use picard::{picard_from, picard_semilinear, PicardOptions, PicardOutcome};
pub use quadrature::{gauss_legendre, integral_means, DEFAULT_ORDER};

use std::fmt::Debug;
use std::sync::Arc;

/// A nonlinearity `F(s, p)` with its first and second partial derivatives.
///
/// `s` stands for the state value and `p` for its space derivative.
pub trait Nonlinearity: Debug + Send + Sync {
    fn name(&self) -> &str;
    fn f(&self, s: f64, p: f64) -> f64;
    fn d1(&self, s: f64, p: f64) -> f64;
    fn d2(&self, s: f64, p: f64) -> f64;
    fn d11(&self, s: f64, p: f64) -> f64;
    fn d12(&self, s: f64, p: f64) -> f64;
    fn d21(&self, s: f64, p: f64) -> f64 {
        self.d12(s, p)
    }
    fn d22(&self, s: f64, p: f64) -> f64;
    /// Declared global Lipschitz constant, if known.
    fn lipschitz(&self) -> Option<f64> {
        None
    }
    /// True when all second derivatives vanish identically.
    fn is_affine(&self) -> bool {
        false
    }
}

pub type SharedNonlinearity = Arc<dyn Nonlinearity>;

/// `F ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl Nonlinearity for Zero {
    fn name(&self) -> &str {
        "zero"
    }
    fn f(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d1(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d2(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d11(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d12(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d22(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(0.0)
    }
    fn is_affine(&self) -> bool {
        true
    }
}

/// `F(s, p) = c₁ s + c₂ p`.
#[derive(Debug, Clone, Copy)]
pub struct Linear {
    pub c1: f64,
    pub c2: f64,
}

impl Nonlinearity for Linear {
    fn name(&self) -> &str {
        "linear"
    }
    fn f(&self, s: f64, p: f64) -> f64 {
        self.c1 * s + self.c2 * p
    }
    fn d1(&self, _: f64, _: f64) -> f64 {
        self.c1
    }
    fn d2(&self, _: f64, _: f64) -> f64 {
        self.c2
    }
    fn d11(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d12(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d22(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(self.c1.hypot(self.c2))
    }
    fn is_affine(&self) -> bool {
        true
    }
}

/// `F(s, p) = c₁ tanh(s) + c₂ sin(p)`.
#[derive(Debug, Clone, Copy)]
pub struct TanhSin {
    pub c1: f64,
    pub c2: f64,
}

impl Default for TanhSin {
    fn default() -> Self {
        TanhSin { c1: 0.5, c2: 0.1 }
    }
}

fn sech2(s: f64) -> f64 {
    let c = s.cosh();
    if c.is_finite() {
        1.0 / (c * c)
    } else {
        0.0
    }
}

impl Nonlinearity for TanhSin {
    fn name(&self) -> &str {
        "tanh_sin"
    }
    fn f(&self, s: f64, p: f64) -> f64 {
        self.c1 * s.tanh() + self.c2 * p.sin()
    }
    fn d1(&self, s: f64, _: f64) -> f64 {
        self.c1 * sech2(s)
    }
    fn d2(&self, _: f64, p: f64) -> f64 {
        self.c2 * p.cos()
    }
    fn d11(&self, s: f64, _: f64) -> f64 {
        -2.0 * self.c1 * sech2(s) * s.tanh()
    }
    fn d12(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d22(&self, _: f64, p: f64) -> f64 {
        -self.c2 * p.sin()
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(self.c1.abs().hypot(self.c2.abs()))
    }
}

use super::quadrature::{gauss_legendre, integral_means};
use super::Nonlinearity;
use crate::domain::{Model, SpaceTimeField};
use crate::solver::{central_gradient, CoupledCoefficients, DriftForm, LinearCoefficients};

/// Frozen linear coefficients of the state and adjoint equations at a
/// given trajectory `z`.
#[derive(Debug, Clone)]
pub struct FrozenCoefficients {
    /// `a₁ = F₁(z, z_x)` and drift `β·[F₂(z, z_x)/β]`.
    pub state: LinearCoefficients,
    /// `b₁ = D₁F(z, z_x)` and drift `β·[D₂F(z, z_x)/β]`.
    pub adjoint: LinearCoefficients,
    /// Fraction of interior samples where a quotient by `β` was clamped.
    pub clamped_fraction: f64,
}

impl FrozenCoefficients {
    pub fn coupled(&self) -> CoupledCoefficients {
        CoupledCoefficients {
            state: self.state.clone(),
            follower: self.adjoint.clone(),
        }
    }
}

/// Pointwise derivatives of `F` along a trajectory, at interior nodes.
#[derive(Debug, Clone)]
pub struct DerivativeFields {
    pub d1: SpaceTimeField,
    pub d2: SpaceTimeField,
    pub d11: SpaceTimeField,
    pub d12: SpaceTimeField,
    pub d21: SpaceTimeField,
    pub d22: SpaceTimeField,
}

pub fn derivative_fields(nl: &dyn Nonlinearity, model: &Model, y: &SpaceTimeField) -> DerivativeFields {
    let grid = &model.grid;
    let x = grid.nodes();
    let n = grid.n();
    let mut out = DerivativeFields {
        d1: SpaceTimeField::zeros(grid),
        d2: SpaceTimeField::zeros(grid),
        d11: SpaceTimeField::zeros(grid),
        d12: SpaceTimeField::zeros(grid),
        d21: SpaceTimeField::zeros(grid),
        d22: SpaceTimeField::zeros(grid),
    };
    for k in 0..=grid.m() {
        let row = y.row(k);
        let g = central_gradient(x, row);
        for j in 1..n {
            let (s, p) = (row[j], g[j]);
            out.d1.set(k, j, nl.d1(s, p));
            out.d2.set(k, j, nl.d2(s, p));
            out.d11.set(k, j, nl.d11(s, p));
            out.d12.set(k, j, nl.d12(s, p));
            out.d21.set(k, j, nl.d21(s, p));
            out.d22.set(k, j, nl.d22(s, p));
        }
    }
    out
}

/// Builds the frozen coefficients at `z`; every quotient by `β(x)` is
/// clamped to `[-cap, cap]`.
pub fn quotient_coefficients(nl: &dyn Nonlinearity, model: &Model, z: &SpaceTimeField, cap: f64) -> FrozenCoefficients {
    assert!(cap > 0.0, "clamp cap must be positive");
    let grid = &model.grid;
    let x = grid.nodes();
    let beta = model.beta_nodes();
    let n = grid.n();
    let rule = gauss_legendre(super::DEFAULT_ORDER);
    let mut a1 = SpaceTimeField::zeros(grid);
    let mut a_drift = SpaceTimeField::zeros(grid);
    let mut b1 = SpaceTimeField::zeros(grid);
    let mut b_drift = SpaceTimeField::zeros(grid);
    let mut clamped = 0usize;
    let mut total = 0usize;
    let mut quotient = |num: f64, b: f64| -> f64 {
        total += 1;
        if num == 0.0 {
            return 0.0;
        }
        let q = if b == 0.0 { f64::INFINITY * num.signum() } else { num / b };
        if q.abs() > cap {
            clamped += 1;
            b * cap * q.signum()
        } else {
            num
        }
    };
    for k in 0..=grid.m() {
        let row = z.row(k);
        let g = central_gradient(x, row);
        for j in 1..n {
            let (s, p) = (row[j], g[j]);
            let (f1, f2) = integral_means(nl, s, p, &rule);
            a1.set(k, j, f1);
            a_drift.set(k, j, quotient(f2, beta[j]));
            b1.set(k, j, nl.d1(s, p));
            b_drift.set(k, j, quotient(nl.d2(s, p), beta[j]));
        }
    }
    FrozenCoefficients {
        state: LinearCoefficients {
            reaction: a1,
            drift: a_drift,
            form: DriftForm::NonDivergence,
        },
        adjoint: LinearCoefficients {
            reaction: b1,
            drift: b_drift,
            form: DriftForm::Divergence,
        },
        clamped_fraction: if total == 0 { 0.0 } else { clamped as f64 / total as f64 },
    }
}

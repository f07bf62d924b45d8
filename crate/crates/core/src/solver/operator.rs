use super::tridiag::Tridiagonal;
use crate::domain::Model;

/// How the first-order term enters the equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftForm {
    /// `+ d(x) u_x`
    NonDivergence,
    /// `- (d(x) u)_x`
    Divergence,
}

impl DriftForm {
    pub fn flipped(self) -> Self {
        match self {
            DriftForm::NonDivergence => DriftForm::Divergence,
            DriftForm::Divergence => DriftForm::NonDivergence,
        }
    }
}

/// Interior-node matrix of `u ↦ -(a u_x)_x + c u + drift(u)` with
/// homogeneous Dirichlet conditions.
///
/// Diffusion is in flux form with `a` at cell midpoints, the drift is
/// central. The divergence stencil is the exact adjoint of the
/// non-divergence one in the dual-cell weighted product, which is what makes
/// the backward solver the discrete transpose of the forward one.
pub fn spatial_operator(model: &Model, reaction: &[f64], drift: &[f64], form: DriftForm) -> Tridiagonal {
    let grid = &model.grid;
    let x = grid.nodes();
    let a = model.a_mid();
    let n = grid.n();
    let mut t = Tridiagonal::zeros(n - 1);
    for j in 1..n {
        let i = j - 1;
        let twice_h = x[j + 1] - x[j - 1];
        let h = 0.5 * twice_h;
        let kl = a[j - 1] / (x[j] - x[j - 1]);
        let kr = a[j] / (x[j + 1] - x[j]);
        t.sub[i] = -kl / h;
        t.sup[i] = -kr / h;
        t.diag[i] = (kl + kr) / h + reaction[j];
        match form {
            DriftForm::NonDivergence => {
                t.sub[i] -= drift[j] / twice_h;
                t.sup[i] += drift[j] / twice_h;
            }
            DriftForm::Divergence => {
                t.sub[i] += drift[j - 1] / twice_h;
                t.sup[i] -= drift[j + 1] / twice_h;
            }
        }
    }
    t
}

/// One implicit Euler step matrix `I + dt A`.
pub fn step_matrix(model: &Model, dt: f64, reaction: &[f64], drift: &[f64], form: DriftForm) -> Tridiagonal {
    let mut t = spatial_operator(model, reaction, drift, form);
    for i in 0..t.len() {
        t.sub[i] *= dt;
        t.sup[i] *= dt;
        t.diag[i] = 1.0 + dt * t.diag[i];
    }
    t
}

/// Dual-cell weights of the interior nodes.
pub fn interior_weights(model: &Model) -> Vec<f64> {
    let w = model.grid.space_weights();
    w[1..w.len() - 1].to_vec()
}

/// Central difference `(u_{j+1} - u_{j-1}) / (x_{j+1} - x_{j-1})` at the
/// interior nodes; one-sided at the two ends.
pub fn central_gradient(x: &[f64], u: &[f64]) -> Vec<f64> {
    let n = x.len() - 1;
    let mut g = vec![0.0; n + 1];
    g[0] = (u[1] - u[0]) / (x[1] - x[0]);
    g[n] = (u[n] - u[n - 1]) / (x[n] - x[n - 1]);
    for j in 1..n {
        g[j] = (u[j + 1] - u[j - 1]) / (x[j + 1] - x[j - 1]);
    }
    g
}

/// `-(v)_x` in the stencil adjoint to [`central_gradient`]: at interior `j`,
/// `-(v_{j+1} - v_{j-1}) / (x_{j+1} - x_{j-1})` with `v` treated as zero on
/// the boundary nodes.
pub fn central_divergence_adjoint(x: &[f64], v: &[f64]) -> Vec<f64> {
    let n = x.len() - 1;
    let mut out = vec![0.0; n + 1];
    for j in 1..n {
        let right = if j + 1 < n { v[j + 1] } else { 0.0 };
        let left = if j > 1 { v[j - 1] } else { 0.0 };
        out[j] = -(right - left) / (x[j + 1] - x[j - 1]);
    }
    out
}

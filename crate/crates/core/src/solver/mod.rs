//! Linear forward and backward solvers for the degenerate equation.
//!
//! The backward solver is the algebraic transpose of the forward one, so
//! gradients assembled from adjoint solves are exact for the discrete costs.

mod coeffs;
mod march;
mod operator;
mod tridiag;

pub use coeffs::{CoupledCoefficients, LinearCoefficients, SourceSpec};
pub use march::{apply_exp_shift, march_backward, march_forward, solve_backward, solve_forward};
pub use operator::{
    central_divergence_adjoint, central_gradient, interior_weights, spatial_operator, step_matrix, DriftForm,
};
pub use tridiag::Tridiagonal;

//! Numerical solvers for Stackelberg–Nash hierarchical null control of a
//! one-dimensional weakly degenerate semilinear parabolic equation
//!
//! ```text
//! y_t - (a(x) y_x)_x + F(y, y_x) = h 1_ω + v¹ 1_ω₁ + v² 1_ω₂   in (0,T)×(0,1)
//! y(t,0) = y(t,1) = 0,   y(0,·) = y⁰
//! ```
//!
//! Two followers `v¹, v²` play a Nash game on tracking costs, and a leader `h`
//! drives the state to zero at time `T`. The crate is organised bottom-up:
//!
//! * [`domain`]: grids, degenerate coefficients, drift weights, control
//!   regions, weighted norms and the Hardy–Poincaré check.
//! * [`solver`]: implicit Euler forward/backward solvers where the backward
//!   step is the exact discrete adjoint of the forward step.
//! * [`nonlinear`]: the semilinear term, its integral means and the Picard
//!   solver for the state equation.
//! * [`nash`]: follower equilibria, costs, first and second derivative probes.
//! * [`carleman`]: weight functions, parameter selection and observability
//!   experiments.
//! * [`hum`]: penalized leader control via conjugate gradients, ε-sweeps and
//!   the semilinear outer fixed-point loop.
//! * [`cli`]: configuration, scenario runner and artifact emission.

pub mod carleman;
pub mod cli;
pub mod domain;
pub mod error;
pub mod hum;
pub mod nash;
pub mod nonlinear;
pub mod presets;
pub mod solver;

pub use error::{Error, Result};

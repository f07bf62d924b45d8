//! Penalized leader control: conjugate gradients on `J_ε`, ε-sweeps and the
//! outer fixed point for semilinear dynamics.

mod cg;
mod penalized;
mod semilinear;
mod sweep;

pub use cg::{minimize_cg, CgStep, HumResult};
pub use penalized::{control_inner, control_norm, eval_penalized, evaluate, gradient, to_control, Evaluation, HumConfig};
pub use semilinear::{semilinear_stackelberg, state_energy_sq, OuterOptions, StackelbergOutcome};
pub use sweep::{epsilon_sweep, log_log_slope, SweepResult, SweepRow};

//! Follower Nash equilibria for a given leader control, their costs and
//! first/second derivative probes.

mod adjoint;
mod cost;
mod probes;
mod problem;
mod solve;

pub use adjoint::LeaderAdjoint;
pub use cost::CostConfig;
pub use probes::{convexity_probe, eval_cost, stationarity_residual, FirstDerivative, SecondDerivative};
pub use problem::{Dynamics, NashProblem};
pub use solve::{solve_nash, solve_nash_from, NashOptions, NashSolution};

/// Default first-derivative finite-difference step, relative.
pub const FD_FIRST: f64 = 1e-4;
/// Default second-derivative finite-difference step, relative.
pub const FD_SECOND: f64 = 1e-3;

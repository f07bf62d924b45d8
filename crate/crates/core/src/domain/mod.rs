//! Grids, degenerate coefficients, drift weights, control regions and the
//! weighted norms the rest of the crate is built on.

mod coefficient;
mod field;
mod grid;
mod layout;
mod norms;

pub use coefficient::{
    beta_bound, validate_degeneracy, DegeneracyReport, DegenerateCoefficient, DriftWeight,
};
pub use field::{row_inner, row_norm, Levels, SpaceTimeField};
pub use grid::{build_grid, Grading, Grid};
pub use layout::{ControlLayout, Interval, Region};
pub use norms::{gradient_energy, hardy_constant, hardy_ratio, weighted_h1a_norm, weighted_h1a_norm_sq};

use crate::error::Result;

/// A grid together with the coefficient, drift weight and control layout it
/// is discretised for.
#[derive(Debug, Clone)]
pub struct Model {
    pub grid: Grid,
    pub diffusion: DegenerateCoefficient,
    pub beta: DriftWeight,
    pub layout: ControlLayout,
    a_mid: Vec<f64>,
    beta_nodes: Vec<f64>,
}

impl Model {
    pub fn new(
        grid: Grid,
        diffusion: DegenerateCoefficient,
        beta: DriftWeight,
        layout: ControlLayout,
    ) -> Self {
        let a_mid = (0..grid.n()).map(|j| diffusion.eval(grid.midpoint(j))).collect();
        let beta_nodes = grid.nodes().iter().map(|&x| beta.eval(x)).collect();
        Model {
            grid,
            diffusion,
            beta,
            layout,
            a_mid,
            beta_nodes,
        }
    }

    /// Model on the default layout used throughout the experiments.
    pub fn default_on(grid: Grid) -> Result<Self> {
        let layout = ControlLayout::new(
            &grid,
            Interval::new(0.4, 0.7),
            Interval::new(0.05, 0.2),
            Interval::new(0.8, 0.95),
            Interval::new(0.45, 0.65),
        )?;
        Ok(Model::new(
            grid,
            DegenerateCoefficient::power(0.5),
            DriftWeight::identity(),
            layout,
        ))
    }

    /// `a` at the cell midpoints `x_{j+1/2}`.
    pub fn a_mid(&self) -> &[f64] {
        &self.a_mid
    }

    pub fn beta_nodes(&self) -> &[f64] {
        &self.beta_nodes
    }

    pub fn mask(&self, region: Region) -> &[f64] {
        self.layout.mask(region)
    }
}

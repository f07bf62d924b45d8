use crate::error::{Error, Result};

/// Spatial node distribution on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grading {
    Uniform,
    /// `x_k = (k/N)^power`, clustering nodes at the degenerate end.
    GradedLeft { power: f64 },
}

/// Tensor grid on `(0,T) × (0,1)` with uniform time levels.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    times: Vec<f64>,
    horizon: f64,
}

/// Builds a grid with `n` space cells and `m` time steps.
pub fn build_grid(n: usize, m: usize, horizon: f64, grading: Grading) -> Result<Grid> {
    Grid::new(n, m, horizon, grading)
}

impl Grid {
    pub const MIN_CELLS: usize = 4;

    pub fn new(n: usize, m: usize, horizon: f64, grading: Grading) -> Result<Self> {
        if n < Self::MIN_CELLS || m < Self::MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "need at least {} space cells and time steps, got N={n}, M={m}",
                Self::MIN_CELLS
            )));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidGrid(format!("horizon must be positive, got {horizon}")));
        }
        let nodes: Vec<f64> = match grading {
            Grading::Uniform => (0..=n).map(|k| k as f64 / n as f64).collect(),
            Grading::GradedLeft { power } => {
                if !(power.is_finite() && power >= 1.0) {
                    return Err(Error::InvalidGrid(format!(
                        "grading power must be >= 1, got {power}"
                    )));
                }
                (0..=n).map(|k| (k as f64 / n as f64).powf(power)).collect()
            }
        };
        let times = (0..=m).map(|k| horizon * k as f64 / m as f64).collect();
        let grid = Grid {
            nodes,
            times,
            horizon,
        };
        debug_assert!(grid.nodes.windows(2).all(|w| w[0] < w[1]));
        Ok(grid)
    }

    /// Number of space cells `N`.
    pub fn n(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Number of time steps `M`.
    pub fn m(&self) -> usize {
        self.times.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Length of time step `k`, i.e. `t_k - t_{k-1}` for `k >= 1`.
    pub fn dt(&self, k: usize) -> f64 {
        self.times[k] - self.times[k - 1]
    }

    pub fn cell_width(&self, j: usize) -> f64 {
        self.nodes[j + 1] - self.nodes[j]
    }

    pub fn midpoint(&self, j: usize) -> f64 {
        0.5 * (self.nodes[j] + self.nodes[j + 1])
    }

    /// Trapezoidal weights on the nodes; interior weights are the dual cell
    /// widths `(x_{j+1} - x_{j-1}) / 2`.
    pub fn space_weights(&self) -> Vec<f64> {
        let n = self.n();
        let mut w = vec![0.0; n + 1];
        for j in 0..n {
            let h = 0.5 * self.cell_width(j);
            w[j] += h;
            w[j + 1] += h;
        }
        w
    }

    /// Same time levels, space refined by a factor of two.
    pub fn refined(&self) -> Grid {
        let mut nodes = Vec::with_capacity(2 * self.n() + 1);
        for j in 0..self.n() {
            nodes.push(self.nodes[j]);
            nodes.push(self.midpoint(j));
        }
        nodes.push(1.0);
        let m = 2 * self.m();
        let times = (0..=m).map(|k| self.horizon * k as f64 / m as f64).collect();
        Grid {
            nodes,
            times,
            horizon: self.horizon,
        }
    }
}

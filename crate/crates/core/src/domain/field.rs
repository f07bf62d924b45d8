use super::grid::Grid;

/// Samples of a function on the `(M+1) × (N+1)` space-time lattice, row `k`
/// holding time level `t_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

/// Which time levels a space-time quadrature runs over.
///
/// Implicit Euler produces states at levels `1..=M` from sources read at
/// levels `0..M`, and backward sweeps mirror that. Integrals of states are
/// therefore taken over [`Levels::Forward`], integrals of controls and
/// adjoints over [`Levels::Backward`]; with this pairing the discrete
/// forward/backward duality holds exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Levels {
    /// Levels `1..=M`, each weighted by the preceding step.
    Forward,
    /// Levels `0..M`, each weighted by the following step.
    Backward,
}

impl SpaceTimeField {
    pub fn zeros(grid: &Grid) -> Self {
        Self::zeros_dims(grid.m() + 1, grid.n() + 1)
    }

    pub fn zeros_dims(rows: usize, cols: usize) -> Self {
        SpaceTimeField {
            rows,
            cols,
            values: vec![0.0; rows * cols],
        }
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.values.fill(c);
        f
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = Self::zeros(grid);
        for (k, &t) in grid.times().iter().enumerate() {
            let row = out.row_mut(k);
            for (j, &x) in grid.nodes().iter().enumerate() {
                row[j] = f(t, x);
            }
        }
        out
    }

    pub fn from_values(rows: usize, cols: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), rows * cols, "field size mismatch");
        SpaceTimeField { rows, cols, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn fits(&self, grid: &Grid) -> bool {
        self.rows == grid.m() + 1 && self.cols == grid.n() + 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.cols..(k + 1) * self.cols]
    }

    pub fn row_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.values[k * self.cols..(k + 1) * self.cols]
    }

    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.values[k * self.cols + j]
    }

    pub fn set(&mut self, k: usize, j: usize, v: f64) {
        self.values[k * self.cols + j] = v;
    }

    pub fn last_row(&self) -> &[f64] {
        self.row(self.rows - 1)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        SpaceTimeField {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        SpaceTimeField {
            rows: self.rows,
            cols: self.cols,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: f64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    /// Multiplies every row by a per-node weight (e.g. an indicator mask).
    pub fn masked(&self, mask: &[f64]) -> Self {
        assert_eq!(mask.len(), self.cols);
        let mut out = self.clone();
        for k in 0..self.rows {
            for (v, m) in out.row_mut(k).iter_mut().zip(mask) {
                *v *= m;
            }
        }
        out
    }

    /// Discrete `L²(Q)` pairing, optionally restricted by a node mask.
    pub fn inner(&self, other: &Self, grid: &Grid, mask: Option<&[f64]>, levels: Levels) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let w = grid.space_weights();
        let m = grid.m();
        let mut total = 0.0;
        for step in 1..=m {
            let k = match levels {
                Levels::Forward => step,
                Levels::Backward => step - 1,
            };
            let (a, b) = (self.row(k), other.row(k));
            let mut s = 0.0;
            for j in 0..self.cols {
                let wj = match mask {
                    Some(mk) => w[j] * mk[j],
                    None => w[j],
                };
                s += wj * a[j] * b[j];
            }
            total += grid.dt(step) * s;
        }
        total
    }

    pub fn norm(&self, grid: &Grid, mask: Option<&[f64]>, levels: Levels) -> f64 {
        self.inner(self, grid, mask, levels).max(0.0).sqrt()
    }
}

/// Discrete `L²(Ω)` inner product of two node rows.
pub fn row_inner(grid: &Grid, u: &[f64], v: &[f64]) -> f64 {
    grid.space_weights()
        .iter()
        .zip(u.iter().zip(v))
        .map(|(w, (a, b))| w * a * b)
        .sum()
}

pub fn row_norm(grid: &Grid, u: &[f64]) -> f64 {
    row_inner(grid, u, u).max(0.0).sqrt()
}

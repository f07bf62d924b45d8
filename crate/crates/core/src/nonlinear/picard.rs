use super::frozen::quotient_coefficients;
use super::Nonlinearity;
use crate::domain::{Levels, Model, SpaceTimeField};
use crate::error::{Error, Result};
use crate::solver::{march_forward, SourceSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Clamp for quotients by `β`.
    pub cap: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions {
            tol: 1e-12,
            max_iter: 60,
            cap: 1e3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub y: SpaceTimeField,
    /// Relative `L²(Q)` update of each iteration.
    pub residuals: Vec<f64>,
    pub clamped_fraction: f64,
}

impl PicardOutcome {
    pub fn iterations(&self) -> usize {
        self.residuals.len()
    }
}

/// Solves `y_t − (a y_x)_x + F(y, y_x) = src` by freezing the integral-mean
/// coefficients at the previous iterate.
pub fn picard_semilinear(
    nl: &dyn Nonlinearity,
    model: &Model,
    src: &SourceSpec,
    y0: &[f64],
    opts: &PicardOptions,
) -> Result<PicardOutcome> {
    let source = (!src.is_empty()).then(|| src.assemble(model));
    picard_from(nl, model, source.as_ref(), y0, None, opts)
}

/// As [`picard_semilinear`] with an assembled source and an optional
/// starting trajectory.
pub fn picard_from(
    nl: &dyn Nonlinearity,
    model: &Model,
    source: Option<&SpaceTimeField>,
    y0: &[f64],
    start: Option<&SpaceTimeField>,
    opts: &PicardOptions,
) -> Result<PicardOutcome> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput("Picard tolerance must be positive".into()));
    }
    let grid = &model.grid;
    let mut z = start.cloned().unwrap_or_else(|| SpaceTimeField::zeros(grid));
    let mut frozen = quotient_coefficients(nl, model, &z, opts.cap);
    let mut residuals = Vec::new();
    for _ in 0..opts.max_iter {
        let y = march_forward(model, &frozen.state, source, y0)?;
        let norm = y.norm(grid, None, Levels::Forward);
        let diff = y.zip_map(&z, |a, b| a - b).norm(grid, None, Levels::Forward);
        let res = if norm > 0.0 { diff / norm } else { diff };
        residuals.push(res);
        let next = quotient_coefficients(nl, model, &y, opts.cap);
        let frozen_again = next.state == frozen.state;
        z = y;
        frozen = next;
        if res <= opts.tol || frozen_again {
            return Ok(PicardOutcome {
                y: z,
                residuals,
                clamped_fraction: frozen.clamped_fraction,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "picard",
        iterations: opts.max_iter,
        residual: residuals.last().copied().unwrap_or(f64::NAN),
    })
}

use super::cost::CostConfig;
use crate::domain::{Model, Region, SpaceTimeField};
use crate::error::{Error, Result};
use crate::nonlinear::{derivative_fields, picard_from, quotient_coefficients, PicardOptions, SharedNonlinearity};
use crate::solver::{march_backward, march_forward, CoupledCoefficients, LinearCoefficients};

/// How the state depends on its sources.
#[derive(Debug, Clone)]
pub enum Dynamics {
    /// Linear state and follower-adjoint coefficients.
    Linear(CoupledCoefficients),
    /// `y_t − (a y_x)_x + F(y, y_x) = …`, adjoints frozen at the state.
    Semilinear {
        nl: SharedNonlinearity,
        picard: PicardOptions,
    },
}

impl Dynamics {
    pub fn is_linear(&self) -> bool {
        matches!(self, Dynamics::Linear(_))
    }
}

/// Everything the follower game needs besides the leader control.
#[derive(Debug, Clone)]
pub struct NashProblem {
    pub model: Model,
    pub dynamics: Dynamics,
    pub cost: CostConfig,
    pub y0: Vec<f64>,
}

impl NashProblem {
    pub fn new(model: Model, dynamics: Dynamics, cost: CostConfig, y0: Vec<f64>) -> Result<Self> {
        let n = model.grid.n();
        if y0.len() != n + 1 {
            return Err(Error::InvalidInput("initial datum does not match the grid".into()));
        }
        if let Dynamics::Linear(c) = &dynamics {
            let g = &model.grid;
            if !(c.state.reaction.fits(g) && c.state.drift.fits(g) && c.follower.reaction.fits(g) && c.follower.drift.fits(g)) {
                return Err(Error::InvalidInput("coefficient fields do not match the grid".into()));
            }
        }
        Ok(NashProblem {
            model,
            dynamics,
            cost,
            y0,
        })
    }

    /// `h χ_ω + v¹ χ_{ω₁} + v² χ_{ω₂}`.
    pub fn source(&self, h: &SpaceTimeField, v: [&SpaceTimeField; 2]) -> SpaceTimeField {
        let m = &self.model;
        let mut s = h.masked(m.mask(Region::Leader));
        s.axpy(1.0, &v[0].masked(m.mask(Region::Follower1)));
        s.axpy(1.0, &v[1].masked(m.mask(Region::Follower2)));
        s
    }

    /// State driven by the given controls and `y⁰`.
    pub fn state(&self, h: &SpaceTimeField, v: [&SpaceTimeField; 2], warm: Option<&SpaceTimeField>) -> Result<SpaceTimeField> {
        let src = self.source(h, v);
        self.state_from_source(&src, &self.y0, warm)
    }

    pub fn state_from_source(&self, src: &SpaceTimeField, y0: &[f64], warm: Option<&SpaceTimeField>) -> Result<SpaceTimeField> {
        match &self.dynamics {
            Dynamics::Linear(c) => march_forward(&self.model, &c.state, Some(src), y0),
            Dynamics::Semilinear { nl, picard } => Ok(picard_from(nl.as_ref(), &self.model, Some(src), y0, warm, picard)?.y),
        }
    }

    /// Coefficients of the follower adjoints (divergence form) at state `y`.
    pub fn adjoint_coefficients(&self, y: &SpaceTimeField) -> LinearCoefficients {
        match &self.dynamics {
            Dynamics::Linear(c) => c.follower.clone(),
            Dynamics::Semilinear { nl, picard } => quotient_coefficients(nl.as_ref(), &self.model, y, picard.cap).adjoint,
        }
    }

    /// Coefficients of the state sensitivity (non-divergence form) at `y`.
    pub fn tangent_coefficients(&self, y: &SpaceTimeField) -> LinearCoefficients {
        match &self.dynamics {
            Dynamics::Linear(c) => c.state.clone(),
            Dynamics::Semilinear { .. } => self.adjoint_coefficients(y).adjoint(),
        }
    }

    /// `αᵢ (y − y_{i,d}) χ_{ω_d}`.
    pub fn adjoint_source(&self, y: &SpaceTimeField, i: usize) -> SpaceTimeField {
        let a = self.cost.alpha[i];
        y.zip_map(&self.cost.targets[i], |u, t| a * (u - t)).masked(self.model.mask(Region::Observation))
    }

    /// Follower adjoint `pⁱ` for state `y` with precomputed coefficients.
    pub fn follower_adjoint(&self, y: &SpaceTimeField, i: usize, coeffs: &LinearCoefficients) -> Result<SpaceTimeField> {
        let zero = vec![0.0; self.model.grid.n() + 1];
        march_backward(&self.model, coeffs, Some(&self.adjoint_source(y, i)), &zero)
    }

    /// `vⁱ = −pⁱ χ_{ωᵢ} / μᵢ`.
    pub fn control_from_adjoint(&self, p: &SpaceTimeField, i: usize) -> SpaceTimeField {
        let mu = self.cost.mu[i];
        p.masked(self.model.mask(Region::follower(i))).map(|v| -v / mu)
    }

    /// Linearised state response to a source `s` at state `y`, zero initial datum.
    pub fn tangent(&self, y: &SpaceTimeField, s: &SpaceTimeField) -> Result<SpaceTimeField> {
        let zero = vec![0.0; self.model.grid.n() + 1];
        march_forward(&self.model, &self.tangent_coefficients(y), Some(s), &zero)
    }

    /// Second-derivative fields of `F` along `y`, `None` for linear dynamics.
    pub(crate) fn curvature(&self, y: &SpaceTimeField) -> Option<crate::nonlinear::DerivativeFields> {
        match &self.dynamics {
            Dynamics::Linear(_) => None,
            Dynamics::Semilinear { nl, .. } if nl.is_affine() => None,
            Dynamics::Semilinear { nl, .. } => Some(derivative_fields(nl.as_ref(), &self.model, y)),
        }
    }
}

use super::operator::DriftForm;
use crate::domain::{Grid, Model, Region, SpaceTimeField};

/// Zeroth- and first-order coefficients of a linear parabolic system.
///
/// `drift` holds the full first-order coefficient, i.e. `β·b₀` rather than
/// `b₀`, sampled at every node and time level.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCoefficients {
    pub reaction: SpaceTimeField,
    pub drift: SpaceTimeField,
    pub form: DriftForm,
}

impl LinearCoefficients {
    pub fn zero(grid: &Grid, form: DriftForm) -> Self {
        LinearCoefficients {
            reaction: SpaceTimeField::zeros(grid),
            drift: SpaceTimeField::zeros(grid),
            form,
        }
    }

    /// Constant `a₀` and `b₀`, with the drift `β(x)·b₀`.
    pub fn constant(model: &Model, a0: f64, b0: f64, form: DriftForm) -> Self {
        let grid = &model.grid;
        let beta = model.beta_nodes();
        let mut drift = SpaceTimeField::zeros(grid);
        for k in 0..=grid.m() {
            for (d, &b) in drift.row_mut(k).iter_mut().zip(beta) {
                *d = b * b0;
            }
        }
        LinearCoefficients {
            reaction: SpaceTimeField::constant(grid, a0),
            drift,
            form,
        }
    }

    /// `a₀` and `β·b₀` from fields sampled on the grid.
    pub fn from_quotient(model: &Model, a0: SpaceTimeField, b0: &SpaceTimeField, form: DriftForm) -> Self {
        let beta = model.beta_nodes();
        let mut drift = b0.clone();
        for k in 0..drift.rows() {
            for (d, &b) in drift.row_mut(k).iter_mut().zip(beta) {
                *d *= b;
            }
        }
        LinearCoefficients {
            reaction: a0,
            drift,
            form,
        }
    }

    /// Coefficients of the formal adjoint: same samples, drift form flipped.
    pub fn adjoint(&self) -> Self {
        LinearCoefficients {
            reaction: self.reaction.clone(),
            drift: self.drift.clone(),
            form: self.form.flipped(),
        }
    }

    pub fn with_form(mut self, form: DriftForm) -> Self {
        self.form = form;
        self
    }

    pub fn is_finite(&self) -> bool {
        self.reaction.is_finite() && self.drift.is_finite()
    }

    pub fn sup_reaction(&self) -> f64 {
        self.reaction.max_abs()
    }

    pub fn sup_drift(&self) -> f64 {
        self.drift.max_abs()
    }

    /// `sup |b₀|` recovered from `drift / β` on nodes where `β ≠ 0`.
    pub fn sup_quotient(&self, model: &Model) -> f64 {
        let beta = model.beta_nodes();
        let mut sup: f64 = 0.0;
        for k in 0..self.drift.rows() {
            for (d, &b) in self.drift.row(k).iter().zip(beta) {
                if b != 0.0 {
                    sup = sup.max((d / b).abs());
                }
            }
        }
        sup
    }

    /// `min a₀ − ½ L² ‖b₀‖²_∞`; positive means the coercivity condition
    /// holds with `α = min a₀`.
    pub fn coercivity_margin(&self, model: &Model, l: f64) -> f64 {
        let min_a0 = self.reaction.values().iter().copied().fold(f64::INFINITY, f64::min);
        let b = self.sup_quotient(model);
        min_a0 - 0.5 * l * l * b * b
    }

    /// Rate `r = ‖a₀‖_∞ + ½ L² ‖b₀‖²_∞ + 2` of the exponential shift that
    /// makes the shifted operator coercive.
    pub fn coercivity_shift(&self, model: &Model, l: f64) -> f64 {
        let b = self.sup_quotient(model);
        self.sup_reaction() + 0.5 * l * l * b * b + 2.0
    }
}

/// Right-hand side `h χ_ω + v¹ χ_{ω₁} + v² χ_{ω₂} + g`.
#[derive(Debug, Clone, Default)]
pub struct SourceSpec {
    pub leader: Option<SpaceTimeField>,
    pub follower1: Option<SpaceTimeField>,
    pub follower2: Option<SpaceTimeField>,
    pub distributed: Option<SpaceTimeField>,
}

impl SourceSpec {
    pub fn none() -> Self {
        SourceSpec::default()
    }

    pub fn distributed(g: SpaceTimeField) -> Self {
        SourceSpec {
            distributed: Some(g),
            ..SourceSpec::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.leader.is_none() && self.follower1.is_none() && self.follower2.is_none() && self.distributed.is_none()
    }

    /// Sum of all parts with each control multiplied by its region mask.
    pub fn assemble(&self, model: &Model) -> SpaceTimeField {
        let mut out = SpaceTimeField::zeros(&model.grid);
        let parts = [
            (&self.leader, Some(Region::Leader)),
            (&self.follower1, Some(Region::Follower1)),
            (&self.follower2, Some(Region::Follower2)),
            (&self.distributed, None),
        ];
        for (field, region) in parts {
            if let Some(f) = field {
                match region {
                    Some(r) => out.axpy(1.0, &f.masked(model.mask(r))),
                    None => out.axpy(1.0, f),
                }
            }
        }
        out
    }
}

/// Coefficients of a state equation together with those of its follower
/// adjoints.
///
/// `state` drives `y` in non-divergence form; `follower` drives the
/// backward follower adjoints in divergence form. The leader adjoint uses
/// `state.adjoint()` and the forward follower sensitivities
/// `follower.adjoint()`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledCoefficients {
    pub state: LinearCoefficients,
    pub follower: LinearCoefficients,
}

impl CoupledCoefficients {
    /// Constant `a₁, a₂` for the state and `b₁, b₂` for the adjoints.
    pub fn constant(model: &Model, a1: f64, a2: f64, b1: f64, b2: f64) -> Self {
        CoupledCoefficients {
            state: LinearCoefficients::constant(model, a1, a2, DriftForm::NonDivergence),
            follower: LinearCoefficients::constant(model, b1, b2, DriftForm::Divergence),
        }
    }

    pub fn zero(grid: &Grid) -> Self {
        CoupledCoefficients {
            state: LinearCoefficients::zero(grid, DriftForm::NonDivergence),
            follower: LinearCoefficients::zero(grid, DriftForm::Divergence),
        }
    }
}

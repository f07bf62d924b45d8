use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;
use std::sync::Arc;

use crate::carleman::CarlemanSettings;
use crate::domain::{
    beta_bound, build_grid, validate_degeneracy, ControlLayout, DegenerateCoefficient, DriftWeight, Grading, Interval,
    Model, Region, SpaceTimeField,
};
use crate::error::{Error, Result};
use crate::hum::{HumConfig, OuterOptions};
use crate::nash::{CostConfig, Dynamics, NashOptions, NashProblem};
use crate::nonlinear::{Linear, PicardOptions, SharedNonlinearity, TanhSin, Zero};
use crate::solver::CoupledCoefficients;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    pub m: usize,
    pub horizon: f64,
    /// `"uniform"` or `"graded"`.
    pub grading: String,
    pub grading_power: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            n: 64,
            m: 64,
            horizon: 1.0,
            grading: "uniform".into(),
            grading_power: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoefficientSection {
    /// Only `"power"`: `a(x) = x^alpha_exp`.
    pub family: String,
    pub alpha_exp: f64,
}

impl Default for CoefficientSection {
    fn default() -> Self {
        CoefficientSection {
            family: "power".into(),
            alpha_exp: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriftSection {
    /// `"zero"` or `"power"`: `β(x) = x^power`.
    pub family: String,
    pub power: f64,
}

impl Default for DriftSection {
    fn default() -> Self {
        DriftSection {
            family: "power".into(),
            power: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegionsSection {
    pub omega: [f64; 2],
    pub omega1: [f64; 2],
    pub omega2: [f64; 2],
    pub omega_d: [f64; 2],
}

impl Default for RegionsSection {
    fn default() -> Self {
        RegionsSection {
            omega: [0.4, 0.7],
            omega1: [0.05, 0.2],
            omega2: [0.8, 0.95],
            omega_d: [0.45, 0.65],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostSection {
    pub alpha: [f64; 2],
    pub mu: [f64; 2],
    /// `"zero"`, or `"bump"`: `y_{i,d} = amplitude_i · t · sin(π(x − a)/(b − a))` on `ω_d = (a, b)`.
    pub target: String,
    pub target_amplitude: [f64; 2],
}

impl Default for CostSection {
    fn default() -> Self {
        CostSection {
            alpha: [1.0, 1.0],
            mu: [100.0, 100.0],
            target: "zero".into(),
            target_amplitude: [0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonlinearitySection {
    /// `"zero"`, `"linear"` (`c1 s + c2 p`) or `"tanh_sin"` (`c1 tanh s + c2 sin p`).
    pub name: String,
    pub c1: f64,
    pub c2: f64,
}

impl Default for NonlinearitySection {
    fn default() -> Self {
        NonlinearitySection {
            name: "linear".into(),
            c1: 0.5,
            c2: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NashSection {
    pub tol: f64,
    pub max_iter: usize,
    pub relax: f64,
}

impl Default for NashSection {
    fn default() -> Self {
        let d = NashOptions::default();
        NashSection {
            tol: d.tol,
            max_iter: d.max_iter,
            relax: d.relax,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CarlemanSection {
    pub o0: [f64; 2],
    pub o1: [f64; 2],
    pub sigma_power: u32,
    pub safety: f64,
    pub s_bar: f64,
    pub samples: usize,
    /// Values of `s` for the Carleman functional ratio sweep.
    pub s_list: Vec<f64>,
}

impl Default for CarlemanSection {
    fn default() -> Self {
        let d = CarlemanSettings::default();
        CarlemanSection {
            o0: [d.o0.lo, d.o0.hi],
            o1: [d.o1.lo, d.o1.hi],
            sigma_power: d.sigma_power,
            safety: d.safety,
            s_bar: d.s_bar,
            samples: 20,
            s_list: vec![1.0, 5.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HumSection {
    pub epsilon: f64,
    pub epsilon_list: Vec<f64>,
    pub cg_tol: f64,
    pub cg_max_iter: usize,
    pub inner_tol: f64,
    pub outer_tol: f64,
    pub outer_max_iter: usize,
}

impl Default for HumSection {
    fn default() -> Self {
        let d = HumConfig::default();
        let o = OuterOptions::default();
        HumSection {
            epsilon: 1e-3,
            epsilon_list: d.epsilon_list,
            cg_tol: d.cg_tol,
            cg_max_iter: d.cg_max_iter,
            inner_tol: d.nash.tol,
            outer_tol: o.tol,
            outer_max_iter: o.max_iter,
        }
    }
}

/// A complete scenario. Every section is optional and defaults to the
/// shipped desk-scale configuration; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub output: Option<String>,
    pub grid: GridSection,
    pub coefficient: CoefficientSection,
    pub drift: DriftSection,
    pub regions: RegionsSection,
    pub cost: CostSection,
    pub nonlinearity: NonlinearitySection,
    pub nash: NashSection,
    pub carleman: CarlemanSection,
    pub hum: HumSection,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 42,
            output: None,
            grid: GridSection::default(),
            coefficient: CoefficientSection::default(),
            drift: DriftSection::default(),
            regions: RegionsSection::default(),
            cost: CostSection::default(),
            nonlinearity: NonlinearitySection::default(),
            nash: NashSection::default(),
            carleman: CarlemanSection::default(),
            hum: HumSection::default(),
        }
    }
}

/// Objects built from a validated configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub problem: NashProblem,
    pub nonlinearity: Option<SharedNonlinearity>,
    pub carleman: CarlemanSettings,
    pub hum: HumConfig,
    pub outer: OuterOptions,
}

fn interval(key: &str, v: [f64; 2]) -> Result<Interval> {
    if !(v[0].is_finite() && v[1].is_finite() && v[0] < v[1]) {
        return Err(Error::config(key, format!("[{}, {}] is not an interval", v[0], v[1])));
    }
    Ok(Interval::new(v[0], v[1]))
}

fn toml_error(text: &str, e: toml::de::Error) -> Error {
    let key = e.span().map_or_else(
        || "<document>".to_string(),
        |s| {
            let before = &text[..s.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            format!("line {line}:{col}")
        },
    );
    Error::config(key, e.message().to_string())
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| toml_error(text, e))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// SHA-256 of the canonical serialization, as lowercase hex.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn model(&self) -> Result<Model> {
        let g = &self.grid;
        let grading = match g.grading.as_str() {
            "uniform" => Grading::Uniform,
            "graded" => Grading::GradedLeft { power: g.grading_power },
            other => return Err(Error::config("grid.grading", format!("unknown grading `{other}`"))),
        };
        let grid = build_grid(g.n, g.m, g.horizon, grading).map_err(|e| Error::config("grid", e.to_string()))?;
        if self.coefficient.family != "power" {
            return Err(Error::config(
                "coefficient.family",
                format!("unknown family `{}`", self.coefficient.family),
            ));
        }
        let a = DegenerateCoefficient::power(self.coefficient.alpha_exp);
        let report = validate_degeneracy(&a, &grid);
        if !report.pass() {
            return Err(Error::config(
                "coefficient.alpha_exp",
                format!("violates {}", report.failures().join(", ")),
            ));
        }
        let beta = match self.drift.family.as_str() {
            "zero" => DriftWeight::zero(),
            "power" => DriftWeight::power(self.drift.power),
            other => return Err(Error::config("drift.family", format!("unknown family `{other}`"))),
        };
        let l = beta_bound(&beta, &a, &grid).map_err(|e| Error::config("drift", e.to_string()))?;
        let r = &self.regions;
        let layout = ControlLayout::new(
            &grid,
            interval("regions.omega", r.omega)?,
            interval("regions.omega1", r.omega1)?,
            interval("regions.omega2", r.omega2)?,
            interval("regions.omega_d", r.omega_d)?,
        )?;
        Ok(Model::new(grid, a, beta.with_bound(l), layout))
    }

    pub fn targets(&self, model: &Model) -> Result<[SpaceTimeField; 2]> {
        let od = model.layout.interval(Region::Observation);
        let md = model.mask(Region::Observation);
        match self.cost.target.as_str() {
            "zero" => Ok([SpaceTimeField::zeros(&model.grid), SpaceTimeField::zeros(&model.grid)]),
            "bump" => Ok(self.cost.target_amplitude.map(|amp| {
                SpaceTimeField::from_fn(&model.grid, |t, x| amp * t * (std::f64::consts::PI * (x - od.lo) / od.len()).sin())
                    .masked(md)
            })),
            other => Err(Error::config("cost.target", format!("unknown target `{other}`"))),
        }
    }

    pub fn nash_options(&self) -> NashOptions {
        NashOptions {
            tol: self.nash.tol,
            max_iter: self.nash.max_iter,
            relax: self.nash.relax,
            ..NashOptions::default()
        }
    }

    /// Validates every section and builds the problem.
    pub fn build(&self) -> Result<Scenario> {
        let model = self.model()?;
        let nl = &self.nonlinearity;
        if !(nl.c1.is_finite() && nl.c2.is_finite()) {
            return Err(Error::config("nonlinearity", "constants must be finite"));
        }
        let (dynamics, nonlinearity): (Dynamics, Option<SharedNonlinearity>) = match nl.name.as_str() {
            "zero" => (Dynamics::Linear(CoupledCoefficients::zero(&model.grid)), Some(Arc::new(Zero))),
            "linear" => (
                Dynamics::Linear(CoupledCoefficients::constant(&model, nl.c1, nl.c2, nl.c1, nl.c2)),
                Some(Arc::new(Linear { c1: nl.c1, c2: nl.c2 })),
            ),
            "tanh_sin" => {
                let f: SharedNonlinearity = Arc::new(TanhSin { c1: nl.c1, c2: nl.c2 });
                (
                    Dynamics::Semilinear {
                        nl: f.clone(),
                        picard: PicardOptions::default(),
                    },
                    Some(f),
                )
            }
            other => return Err(Error::config("nonlinearity.name", format!("unknown nonlinearity `{other}`"))),
        };
        let targets = self.targets(&model)?;
        let cost = CostConfig::new(&model, self.cost.alpha, self.cost.mu, targets)?;
        let y0 = crate::presets::initial_datum(&model);
        let nash = self.nash_options();
        if !(nash.tol > 0.0 && nash.relax > 0.0 && nash.relax <= 1.0 && nash.max_iter > 0) {
            return Err(Error::config("nash", "need tol > 0, relax in (0, 1] and max_iter > 0"));
        }
        let c = &self.carleman;
        let carleman = CarlemanSettings {
            o0: interval("carleman.o0", c.o0)?,
            o1: interval("carleman.o1", c.o1)?,
            sigma_power: c.sigma_power,
            safety: c.safety,
            s_bar: c.s_bar,
        };
        if !(c.safety > 0.0 && c.s_bar > 0.0 && c.sigma_power >= 1) {
            return Err(Error::config("carleman", "need safety > 0, s_bar > 0 and sigma_power >= 1"));
        }
        if c.samples == 0 || c.s_list.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::config("carleman.samples", "need at least one sample and positive s values"));
        }
        let h = &self.hum;
        let hum = HumConfig {
            epsilon: h.epsilon,
            cg_tol: h.cg_tol,
            cg_max_iter: h.cg_max_iter,
            nash: NashOptions {
                tol: h.inner_tol,
                max_iter: nash.max_iter.max(HumConfig::default().nash.max_iter),
                relax: nash.relax,
                ..NashOptions::default()
            },
            epsilon_list: h.epsilon_list.clone(),
            ..HumConfig::default()
        };
        hum.validate()?;
        let outer = OuterOptions {
            tol: h.outer_tol,
            max_iter: h.outer_max_iter,
        };
        if !(outer.tol > 0.0) || outer.max_iter == 0 {
            return Err(Error::config("hum.outer_tol", "need outer_tol > 0 and outer_max_iter > 0"));
        }
        let problem = NashProblem::new(model, dynamics, cost, y0)?;
        Ok(Scenario {
            config: self.clone(),
            problem,
            nonlinearity,
            carleman,
            hum,
            outer,
        })
    }
}

/// Reads, parses and validates a scenario file.
pub fn parse_config(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(path.display().to_string(), format!("cannot read: {e}")))?;
    let cfg = ScenarioConfig::from_toml(&text)?;
    cfg.build()?;
    Ok(cfg)
}

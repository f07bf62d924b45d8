use serde::Serialize;
use std::path::Path;
use std::time::Instant;

use super::artifacts::{field_table, fmt_float, ArtifactWriter, CsvTable, RunManifest};
use super::config::{Scenario, ScenarioConfig};
use crate::carleman::{
    admissibility, build_weights, carleman_ratio_experiment, check_weight_ordering, is_admissible, observability_experiment,
    CarlemanWeights,
};
use crate::domain::{hardy_constant, hardy_ratio, SpaceTimeField};
use crate::error::{Error, Result};
use crate::hum::{epsilon_sweep, minimize_cg, semilinear_stackelberg, CgStep};
use crate::nash::{solve_nash, Dynamics};
use crate::nonlinear::{picard_semilinear, validate_assumptions, ProbeLattice};
use crate::solver::{solve_forward, SourceSpec};

/// Pipelines reachable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Solve,
    Nash,
    Hum,
    Sweep,
    Observability,
    Validate,
}

impl std::str::FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown command `{s}`")))
    }
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Solve,
        Command::Nash,
        Command::Hum,
        Command::Sweep,
        Command::Observability,
        Command::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Nash => "nash",
            Command::Hum => "hum",
            Command::Sweep => "sweep",
            Command::Observability => "observability",
            Command::Validate => "validate",
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Slope band and leader spread the ε-sweep must satisfy.
pub const SLOPE_BAND: (f64, f64) = (0.45, 0.75);
pub const H_RATIO_LIMIT: f64 = 10.0;
/// Relative bound on `‖h − ρ‖ / (‖h‖ + 1)` at convergence.
pub const CHARACTERIZATION_TOL: f64 = 1e-6;

struct Runner<'a> {
    scenario: &'a Scenario,
    out: ArtifactWriter,
    manifest: RunManifest,
}

impl Runner<'_> {
    fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let r = f(self);
        self.manifest.stages.push(super::artifacts::Stage {
            name: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        r
    }

    fn weights(&mut self) -> Result<CarlemanWeights> {
        let s = self.scenario;
        self.stage("carleman_weights", |_| build_weights(&s.problem.model, &s.carleman))
    }

    fn require_linear(&self, what: &str) -> Result<()> {
        if self.scenario.problem.dynamics.is_linear() {
            Ok(())
        } else {
            Err(Error::config("nonlinearity.name", format!("`{what}` needs linear dynamics")))
        }
    }

    /// Targets must pass the finite-quadrature admissibility check.
    fn preflight_targets(&mut self, w: &CarlemanWeights) -> Result<()> {
        let p = &self.scenario.problem;
        for (i, t) in p.cost.targets.iter().enumerate() {
            let ok = is_admissible(&p.model, t, w);
            let ln = admissibility(&p.model, t, w).ln;
            self.manifest.check(&format!("admissible_target{}", i + 1), ok, format!("ln integral = {ln}"));
            if !ok {
                return Err(Error::config(
                    "cost.target",
                    format!("target {} violates the admissibility bound ∫∫κ⁻²|y_d|² ≤ 1e12", i + 1),
                ));
            }
        }
        Ok(())
    }

    fn solve(&mut self) -> Result<()> {
        let p = &self.scenario.problem;
        let y = self.stage("solve", |_| match &p.dynamics {
            Dynamics::Linear(c) => solve_forward(&p.model, &c.state, &SourceSpec::none(), &p.y0),
            Dynamics::Semilinear { nl, picard } => {
                picard_semilinear(nl.as_ref(), &p.model, &SourceSpec::none(), &p.y0, picard).map(|o| o.y)
            }
        })?;
        self.manifest.check("state_finite", y.is_finite(), format!("max |y| = {}", fmt_float(y.max_abs())));
        self.out.write_csv("trajectory.csv", &field_table("sncontrol/trajectory", &p.model.grid, &y))
    }

    fn nash(&mut self) -> Result<()> {
        let p = &self.scenario.problem;
        let opts = self.scenario.config.nash_options();
        let h = SpaceTimeField::zeros(&p.model.grid);
        let sol = self.stage("nash", |_| solve_nash(p, &h, &opts))?;
        let last = sol.residuals.last().copied().unwrap_or(0.0);
        self.manifest.check("nash_converged", last <= opts.tol, format!("{} iterations, residual {last:e}", sol.iterations()));
        let g = &p.model.grid;
        self.out.write_csv("nash_state.csv", &field_table("sncontrol/nash_state", g, &sol.y))?;
        self.out.write_csv("nash_follower1.csv", &field_table("sncontrol/nash_follower", g, &sol.v[0]))?;
        self.out.write_csv("nash_follower2.csv", &field_table("sncontrol/nash_follower", g, &sol.v[1]))?;
        #[derive(Serialize)]
        struct Line {
            iteration: usize,
            residual: f64,
        }
        let lines: Vec<Line> = sol
            .residuals
            .iter()
            .enumerate()
            .map(|(i, &r)| Line {
                iteration: i + 1,
                residual: r,
            })
            .collect();
        self.out.write_json_lines("nash_log.jsonl", &lines)
    }

    fn hum(&mut self) -> Result<()> {
        let w = self.weights()?;
        self.preflight_targets(&w)?;
        let s = self.scenario;
        let p = &s.problem;
        #[derive(Serialize)]
        struct HumReport<'a> {
            epsilon: f64,
            y_final_norm: f64,
            h_norm: f64,
            gradient_norm: f64,
            characterization_residual: f64,
            value: f64,
            iterations: usize,
            converged: bool,
            log: &'a [CgStep],
            outer_residuals: Option<&'a [f64]>,
            outer_h_norms: Option<&'a [f64]>,
        }
        let (res, outer) = if p.dynamics.is_linear() {
            (self.stage("hum", |_| minimize_cg(p, &s.hum, None))?, None)
        } else {
            let o = self.stage("hum_outer", |_| semilinear_stackelberg(p, &s.hum, &s.outer))?;
            let detail = format!("{} outer iterations, last residual {:e}", o.iterations(), o.residuals.last().copied().unwrap_or(0.0));
            self.manifest.check("outer_converged", o.converged, detail);
            (o.result.clone(), Some(o))
        };
        self.manifest.check("cg_converged", res.converged, format!("{} steps, ‖∇J‖ = {:e}", res.iterations, res.gradient_norm));
        let rel = res.characterization_residual / (res.h_norm + 1.0);
        self.manifest.check("characterization", rel <= CHARACTERIZATION_TOL, format!("‖h − ρ‖/(‖h‖+1) = {rel:e}"));
        let report = HumReport {
            epsilon: res.epsilon,
            y_final_norm: res.y_final_norm,
            h_norm: res.h_norm,
            gradient_norm: res.gradient_norm,
            characterization_residual: res.characterization_residual,
            value: res.value,
            iterations: res.iterations,
            converged: res.converged,
            log: &res.log,
            outer_residuals: outer.as_ref().map(|o| o.residuals.as_slice()),
            outer_h_norms: outer.as_ref().map(|o| o.h_norms.as_slice()),
        };
        self.out.write_json("hum_result.json", "sncontrol/hum_result", &report)?;
        let g = &p.model.grid;
        self.out.write_csv("hum_leader.csv", &field_table("sncontrol/hum_leader", g, &res.h))?;
        self.out.write_csv("hum_state.csv", &field_table("sncontrol/hum_state", g, &res.nash.y))
    }

    fn sweep(&mut self) -> Result<()> {
        self.require_linear("sweep")?;
        let w = self.weights()?;
        self.preflight_targets(&w)?;
        let s = self.scenario;
        let sweep = self.stage("sweep", |_| epsilon_sweep(&s.problem, &s.hum))?;
        let mut t = CsvTable::new("sncontrol/sweep", vec!["epsilon", "yT_norm", "h_norm", "cg_iters", "slope_running"]);
        for r in &sweep.rows {
            t.push(vec![
                fmt_float(r.epsilon),
                fmt_float(r.y_final_norm),
                fmt_float(r.h_norm),
                r.cg_iterations.to_string(),
                fmt_float(r.running_slope),
            ]);
        }
        self.out.write_csv("sweep.csv", &t)?;
        #[derive(Serialize)]
        struct Summary {
            slope: f64,
            h_ratio: f64,
            points: usize,
        }
        let summary = Summary {
            slope: sweep.slope,
            h_ratio: sweep.h_ratio,
            points: sweep.rows.len(),
        };
        self.out.write_json("sweep_summary.json", "sncontrol/sweep_summary", &summary)?;
        let all = sweep.rows.iter().all(|r| r.converged);
        self.manifest.check("sweep_converged", all, format!("{} ε values", sweep.rows.len()));
        let in_band = sweep.slope >= SLOPE_BAND.0 && sweep.slope <= SLOPE_BAND.1;
        self.manifest.check("decay_slope", in_band, format!("slope {} in [{}, {}]", sweep.slope, SLOPE_BAND.0, SLOPE_BAND.1));
        self.manifest.check("leader_spread", sweep.h_ratio <= H_RATIO_LIMIT, format!("max/min ‖h‖ = {}", sweep.h_ratio));
        Ok(())
    }

    fn observability(&mut self) -> Result<()> {
        self.require_linear("observability")?;
        let w = self.weights()?;
        let s = self.scenario;
        let p = &s.problem;
        let g = &p.model.grid;
        let mut profile = CsvTable::new("sncontrol/carleman_profile", vec!["x", "sigma", "delta", "psi", "phi_mid", "big_phi_mid"]);
        let mid = 0.5 * g.horizon();
        for &x in g.nodes() {
            let v = w.eval(mid, x)?;
            profile.push(vec![
                fmt_float(x),
                fmt_float(w.sigma.eval(x)),
                fmt_float(v.delta),
                fmt_float(v.psi),
                fmt_float(v.phi),
                fmt_float(v.big_phi),
            ]);
        }
        self.out.write_csv("carleman_profile.csv", &profile)?;
        let n = s.config.carleman.samples;
        let seed = s.config.seed;
        let opts = s.hum.nash;
        let stats = self.stage("observability", |_| Ok(observability_experiment(&w, p, n, seed, &opts)))?;
        self.out.write_json("observability.json", "sncontrol/observability", &stats)?;
        let mut summary = CsvTable::new("sncontrol/observability_summary", vec!["n", "samples", "failures", "max_ratio", "median_ratio"]);
        summary.push(vec![
            g.n().to_string(),
            n.to_string(),
            stats.failures.to_string(),
            fmt_float(stats.max_ratio),
            fmt_float(stats.median_ratio),
        ]);
        self.out.write_csv("observability.csv", &summary)?;
        let finite = stats.failures == 0 && stats.samples.iter().all(|x| x.ratio.is_finite());
        self.manifest.check("observability_finite", finite, format!("max ratio {}", stats.max_ratio));
        let mut ratios = CsvTable::new("sncontrol/carleman_ratio", vec!["s", "sample", "ln_ratio"]);
        let s_list = s.config.carleman.s_list.clone();
        let all = self.stage("carleman_ratios", |_| {
            s_list.iter().map(|&sv| carleman_ratio_experiment(&p.model, &w, sv, n, seed)).collect::<Result<Vec<_>>>()
        })?;
        let mut finite_ratios = true;
        for (sv, rs) in s_list.iter().zip(&all) {
            for (i, r) in rs.iter().enumerate() {
                finite_ratios &= r.is_finite();
                ratios.push(vec![fmt_float(*sv), i.to_string(), fmt_float(*r)]);
            }
        }
        self.out.write_csv("carleman_ratio.csv", &ratios)?;
        self.manifest.check("carleman_ratio_finite", finite_ratios, format!("{} values of s", s_list.len()));
        Ok(())
    }

    fn validate(&mut self) -> Result<()> {
        let s = self.scenario;
        let model = &s.problem.model;
        let g = &model.grid;
        self.manifest.check("degeneracy", true, format!("a = {:?}", model.diffusion));
        self.manifest.check("drift_bound", true, format!("|β| ≤ L√a with L = {:?}", model.beta.bound()));
        self.manifest.check("regions", true, "ωᵢ∩ω=∅ and ω_d∩ω≠∅");
        let theta = model.diffusion.tau();
        let limit = hardy_constant(theta) * 1.05;
        let probes: [fn(f64) -> f64; 3] = [
            |x| x * (1.0 - x),
            |x| (std::f64::consts::PI * x).sin(),
            |x| x.powf(0.6) * (1.0 - x),
        ];
        let mut worst: f64 = 0.0;
        for f in probes {
            let z: Vec<f64> = g.nodes().iter().map(|&x| f(x)).collect();
            worst = worst.max(hardy_ratio(g, &z, &model.diffusion)?);
        }
        self.manifest.check("hardy_poincare", worst <= limit, format!("max ratio {worst} ≤ {limit}"));
        if let Some(nl) = &s.nonlinearity {
            let rep = validate_assumptions(nl.as_ref(), &ProbeLattice::default());
            self.manifest.check("nonlinearity", rep.pass(), format!("{} h1={} h3={} h4={} h6={}", nl.name(), rep.h1, rep.h3, rep.h4, rep.h6));
            self.out.write_json("nonlinearity.json", "sncontrol/assumptions", &rep)?;
        }
        let w = self.weights()?;
        let ord = check_weight_ordering(&w, g)?;
        self.manifest.check(
            "carleman_ordering",
            ord.pass(),
            format!("r = {}, d = {}, I = {:?}", w.params.r, w.params.d, w.params.interval),
        );
        self.out.write_json("carleman_parameters.json", "sncontrol/carleman_parameters", &(w.params, ord))?;
        for (i, t) in s.problem.cost.targets.iter().enumerate() {
            let ln = admissibility(model, t, &w).ln;
            self.manifest.check(&format!("admissible_target{}", i + 1), is_admissible(model, t, &w), format!("ln integral = {ln}"));
        }
        Ok(())
    }
}

/// Runs one pipeline and writes its artifacts plus `manifest.json` into
/// `out`. The manifest is written on every path, including failures.
pub fn run_scenario(cfg: &ScenarioConfig, command: Command, out: &Path) -> Result<RunManifest> {
    let mut manifest = RunManifest::new(command.name(), cfg.hash(), cfg.seed);
    let scenario = match cfg.build() {
        Ok(s) => s,
        Err(e) => {
            manifest.error = Some(e.to_string());
            manifest.exit_code = if e.is_config() { EXIT_CONFIG } else { EXIT_NUMERICAL };
            manifest.write(out)?;
            return Ok(manifest);
        }
    };
    let mut runner = Runner {
        scenario: &scenario,
        out: ArtifactWriter::new(out)?,
        manifest,
    };
    let result = match command {
        Command::Solve => runner.solve(),
        Command::Nash => runner.nash(),
        Command::Hum => runner.hum(),
        Command::Sweep => runner.sweep(),
        Command::Observability => runner.observability(),
        Command::Validate => runner.validate(),
    };
    let mut manifest = runner.manifest;
    manifest.files = runner.out.files().to_vec();
    manifest.exit_code = match &result {
        Err(e) if e.is_config() => EXIT_CONFIG,
        Err(_) => EXIT_NUMERICAL,
        Ok(()) if manifest.all_pass() => EXIT_OK,
        Ok(()) => EXIT_NUMERICAL,
    };
    if let Err(e) = result {
        manifest.error = Some(e.to_string());
    }
    manifest.write(out)?;
    Ok(manifest)
}

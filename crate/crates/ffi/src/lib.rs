//! C ABI over the solver suite.
//!
//! Every entry point returns an [`SncStatus`]; on failure the message is
//! available from [`snc_last_error`] on the same thread. Problems are
//! opaque handles released with [`snc_problem_free`]. Space-time arrays are
//! row-major `(M+1) × (N+1)`, row `k` holding time level `t_k`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use sncontrol::cli::{run_scenario, Command, Scenario, ScenarioConfig};
use sncontrol::domain::SpaceTimeField;
use sncontrol::hum::{minimize_cg, semilinear_stackelberg};
use sncontrol::nash::{solve_nash, Dynamics};
use sncontrol::nonlinear::picard_semilinear;
use sncontrol::solver::{solve_forward, SourceSpec};
use sncontrol::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SncStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Scalars of a penalized leader solve.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SncHumSummary {
    pub epsilon: f64,
    pub y_final_norm: f64,
    pub h_norm: f64,
    pub gradient_norm: f64,
    pub characterization_residual: f64,
    pub iterations: u32,
    pub outer_iterations: u32,
    pub converged: bool,
}

/// A validated scenario.
pub struct SncProblem {
    scenario: Scenario,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(err: &Error) -> SncStatus {
    if err.is_config() {
        SncStatus::Config
    } else {
        SncStatus::Numerical
    }
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), (SncStatus, String)>) -> SncStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SncStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(msg);
            SncStatus::Panic
        }
    }
}

fn lift<T>(r: sncontrol::Result<T>) -> Result<T, (SncStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

/// # Safety
/// `s` is null or a NUL-terminated string valid for the call.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (SncStatus, String)> {
    if s.is_null() {
        return Err((SncStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (SncStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn problem_ref<'a>(p: *const SncProblem) -> Result<&'a SncProblem, (SncStatus, String)> {
    // SAFETY: non-null handles come from `snc_problem_*` constructors.
    unsafe { p.as_ref() }.ok_or((SncStatus::NullPointer, "problem handle is null".into()))
}

/// # Safety
/// `out` is null or valid for `len` writes.
unsafe fn out_slice<'a>(out: *mut f64, len: usize, need: usize) -> Result<&'a mut [f64], (SncStatus, String)> {
    if out.is_null() {
        return Err((SncStatus::NullPointer, "output buffer is null".into()));
    }
    if len < need {
        return Err((SncStatus::BufferTooSmall, format!("buffer holds {len} values, need {need}")));
    }
    Ok(std::slice::from_raw_parts_mut(out, need))
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn snc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn snc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn boxed(cfg: ScenarioConfig, out: *mut *mut SncProblem) -> Result<(), (SncStatus, String)> {
    if out.is_null() {
        return Err((SncStatus::NullPointer, "output handle pointer is null".into()));
    }
    let scenario = lift(cfg.build())?;
    // SAFETY: checked non-null above.
    unsafe { *out = Box::into_raw(Box::new(SncProblem { scenario })) };
    Ok(())
}

/// Builds a problem from a scenario document in TOML.
///
/// # Safety
/// `toml` is a NUL-terminated string; `out` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn snc_problem_from_toml(toml: *const c_char, out: *mut *mut SncProblem) -> SncStatus {
    guard(|| {
        let text = read_str(toml, "toml")?;
        let cfg = lift(ScenarioConfig::from_toml(text))?;
        boxed(cfg, out)
    })
}

/// Builds the default scenario on an `n × m` grid.
///
/// # Safety
/// `out` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn snc_problem_default(n: u32, m: u32, out: *mut *mut SncProblem) -> SncStatus {
    guard(|| {
        let mut cfg = ScenarioConfig::default();
        cfg.grid.n = n as usize;
        cfg.grid.m = m as usize;
        boxed(cfg, out)
    })
}

/// Releases a problem; null is ignored.
///
/// # Safety
/// `p` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn snc_problem_free(p: *mut SncProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Space cells `N` and time steps `M`.
///
/// # Safety
/// `n` and `m` are valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn snc_problem_dims(p: *const SncProblem, n: *mut u32, m: *mut u32) -> SncStatus {
    guard(|| {
        let g = &problem_ref(p)?.scenario.problem.model.grid;
        if n.is_null() || m.is_null() {
            return Err((SncStatus::NullPointer, "dimension pointer is null".into()));
        }
        *n = g.n() as u32;
        *m = g.m() as u32;
        Ok(())
    })
}

fn field_len(p: &SncProblem) -> usize {
    let g = &p.scenario.problem.model.grid;
    (g.n() + 1) * (g.m() + 1)
}

/// Uncontrolled state trajectory into `out`, which holds `len` values.
///
/// # Safety
/// `out` is valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn snc_solve_state(p: *const SncProblem, out: *mut f64, len: usize) -> SncStatus {
    guard(|| {
        let prob = problem_ref(p)?;
        let dst = out_slice(out, len, field_len(prob))?;
        let np = &prob.scenario.problem;
        let y = lift(match &np.dynamics {
            Dynamics::Linear(c) => solve_forward(&np.model, &c.state, &SourceSpec::none(), &np.y0),
            Dynamics::Semilinear { nl, picard } => {
                picard_semilinear(nl.as_ref(), &np.model, &SourceSpec::none(), &np.y0, picard).map(|o| o.y)
            }
        })?;
        dst.copy_from_slice(y.values());
        Ok(())
    })
}

/// Follower Nash equilibrium for leader control `h` (null for `h = 0`);
/// writes the state into `y_out` and the iteration count into `iterations`
/// when non-null.
///
/// # Safety
/// `h` is null or valid for `h_len` reads; `y_out` is valid for `y_len`
/// writes; `iterations` is null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn snc_nash(
    p: *const SncProblem,
    h: *const f64,
    h_len: usize,
    y_out: *mut f64,
    y_len: usize,
    iterations: *mut u32,
) -> SncStatus {
    guard(|| {
        let prob = problem_ref(p)?;
        let np = &prob.scenario.problem;
        let g = &np.model.grid;
        let need = field_len(prob);
        let leader = if h.is_null() {
            SpaceTimeField::zeros(g)
        } else {
            if h_len != need {
                return Err((SncStatus::InvalidArgument, format!("h holds {h_len} values, need {need}")));
            }
            let v = std::slice::from_raw_parts(h, need).to_vec();
            SpaceTimeField::from_values(g.m() + 1, g.n() + 1, v)
        };
        let dst = out_slice(y_out, y_len, need)?;
        let sol = lift(solve_nash(np, &leader, &prob.scenario.config.nash_options()))?;
        dst.copy_from_slice(sol.y.values());
        if !iterations.is_null() {
            *iterations = sol.iterations() as u32;
        }
        Ok(())
    })
}

/// Minimizes the penalized leader cost at `epsilon`; semilinear problems
/// run the outer fixed point.
///
/// # Safety
/// `out` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn snc_hum(p: *const SncProblem, epsilon: f64, out: *mut SncHumSummary) -> SncStatus {
    guard(|| {
        let prob = problem_ref(p)?;
        if out.is_null() {
            return Err((SncStatus::NullPointer, "summary pointer is null".into()));
        }
        let s = &prob.scenario;
        let cfg = s.hum.with_epsilon(epsilon);
        let (res, outer) = if s.problem.dynamics.is_linear() {
            (lift(minimize_cg(&s.problem, &cfg, None))?, 0)
        } else {
            let o = lift(semilinear_stackelberg(&s.problem, &cfg, &s.outer))?;
            let n = o.iterations() as u32;
            (o.result, n)
        };
        *out = SncHumSummary {
            epsilon: res.epsilon,
            y_final_norm: res.y_final_norm,
            h_norm: res.h_norm,
            gradient_norm: res.gradient_norm,
            characterization_residual: res.characterization_residual,
            iterations: res.iterations as u32,
            outer_iterations: outer,
            converged: res.converged,
        };
        Ok(())
    })
}

/// Runs a CLI pipeline (`"solve"`, `"nash"`, `"hum"`, `"sweep"`,
/// `"observability"` or `"validate"`) and stores its exit code.
///
/// # Safety
/// String arguments are NUL-terminated; `exit_code` is valid for one write.
#[no_mangle]
pub unsafe extern "C" fn snc_run_scenario(
    toml: *const c_char,
    command: *const c_char,
    out_dir: *const c_char,
    exit_code: *mut i32,
) -> SncStatus {
    guard(|| {
        let text = read_str(toml, "toml")?;
        let name = read_str(command, "command")?;
        let dir = read_str(out_dir, "out_dir")?;
        if exit_code.is_null() {
            return Err((SncStatus::NullPointer, "exit code pointer is null".into()));
        }
        let cmd: Command = name.parse().map_err(|e: Error| (SncStatus::InvalidArgument, e.to_string()))?;
        let cfg = lift(ScenarioConfig::from_toml(text))?;
        let manifest = lift(run_scenario(&cfg, cmd, Path::new(dir)))?;
        *exit_code = manifest.exit_code;
        Ok(())
    })
}

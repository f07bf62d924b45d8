use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sncontrol::domain::{row_inner, Region, SpaceTimeField};
use sncontrol::hum::{
    control_inner, epsilon_sweep, eval_penalized, gradient, minimize_cg, semilinear_stackelberg, HumConfig,
    OuterOptions,
};
use sncontrol::nash::{CostConfig, Dynamics, NashProblem};
use sncontrol::nonlinear::{PicardOptions, Zero};
use sncontrol::presets;
use sncontrol::solver::{step_matrix, CoupledCoefficients};
use std::sync::Arc;

fn random_leader(problem: &NashProblem, rng: &mut ChaCha8Rng) -> SpaceTimeField {
    let grid = &problem.model.grid;
    let mut f = SpaceTimeField::zeros(grid);
    for k in 0..grid.m() {
        for j in 0..f.cols() {
            f.set(k, j, rng.random_range(-1.0..1.0));
        }
    }
    f.masked(problem.model.mask(Region::Leader))
}

fn with_targets(mut problem: NashProblem) -> NashProblem {
    let model = problem.model.clone();
    let yd = SpaceTimeField::from_fn(&model.grid, |t, x| 0.2 * t * x).masked(model.mask(Region::Observation));
    problem.cost = CostConfig::new(&model, [1.0, 0.5], [20.0, 40.0], [yd.clone(), yd.scaled(-0.5)]).unwrap();
    problem
}

fn config(epsilon: f64) -> HumConfig {
    HumConfig {
        epsilon,
        ..HumConfig::default()
    }
}

/// Dense follower system with `vⁱ` eliminated: unknowns `yⁿ` (n = 1..=M) and
/// `pⁱ_k` (k = 0..M−1) at interior nodes. Returns the matrix and a map from
/// `(h, y⁰, targets?)` to the right-hand side.
struct DenseFollowers {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    ni: usize,
    m: usize,
}

impl DenseFollowers {
    fn new(problem: &NashProblem) -> Self {
        let Dynamics::Linear(c) = &problem.dynamics else { panic!("linear only") };
        let model = &problem.model;
        let grid = &model.grid;
        let (n, m) = (grid.n(), grid.m());
        let ni = n - 1;
        let block = m * ni;
        let yi = |s: usize, j: usize| (s - 1) * ni + (j - 1);
        let pi = |i: usize, k: usize, j: usize| (1 + i) * block + k * ni + (j - 1);
        let mut a = DMatrix::<f64>::zeros(3 * block, 3 * block);
        let md = model.mask(Region::Observation);
        for step in 1..=m {
            let s = step_matrix(model, grid.dt(step), c.state.reaction.row(step), c.state.drift.row(step), c.state.form);
            for j in 1..n {
                let r = yi(step, j);
                a[(r, r)] = s.diag[j - 1];
                if j > 1 {
                    a[(r, yi(step, j - 1))] = s.sub[j - 1];
                }
                if j < n - 1 {
                    a[(r, yi(step, j + 1))] = s.sup[j - 1];
                }
                if step > 1 {
                    a[(r, yi(step - 1, j))] = -1.0;
                }
                for i in 0..2 {
                    let mi = model.mask(Region::follower(i))[j];
                    a[(r, pi(i, step - 1, j))] += grid.dt(step) * mi / problem.cost.mu[i];
                }
            }
        }
        for i in 0..2 {
            for k in 0..m {
                let dt = grid.dt(k + 1);
                let s = step_matrix(model, dt, c.follower.reaction.row(k + 1), c.follower.drift.row(k + 1), c.follower.form);
                for j in 1..n {
                    let r = pi(i, k, j);
                    a[(r, r)] = s.diag[j - 1];
                    if j > 1 {
                        a[(r, pi(i, k, j - 1))] = s.sub[j - 1];
                    }
                    if j < n - 1 {
                        a[(r, pi(i, k, j + 1))] = s.sup[j - 1];
                    }
                    if k + 1 < m {
                        a[(r, pi(i, k + 1, j))] = -1.0;
                    }
                    a[(r, yi(k + 1, j))] -= dt * problem.cost.alpha[i] * md[j];
                }
            }
        }
        DenseFollowers { lu: a.lu(), ni, m }
    }

    /// Interior values of `y(T)` for leader `h`; the affine part is included
    /// only when `affine` is set.
    fn terminal(&self, problem: &NashProblem, h: &SpaceTimeField, affine: bool) -> Vec<f64> {
        let model = &problem.model;
        let grid = &model.grid;
        let (ni, m) = (self.ni, self.m);
        let block = m * ni;
        let md = model.mask(Region::Observation);
        let ml = model.mask(Region::Leader);
        let mut b = DVector::<f64>::zeros(3 * block);
        for step in 1..=m {
            for j in 1..=ni {
                let r = (step - 1) * ni + (j - 1);
                b[r] += grid.dt(step) * ml[j] * h.get(step - 1, j);
                if affine && step == 1 {
                    b[r] += problem.y0[j];
                }
            }
        }
        if affine {
            for i in 0..2 {
                for k in 0..m {
                    for j in 1..=ni {
                        let r = (1 + i) * block + k * ni + (j - 1);
                        b[r] -= grid.dt(k + 1) * problem.cost.alpha[i] * md[j] * problem.cost.targets[i].get(k + 1, j);
                    }
                }
            }
        }
        let sol = self.lu.solve(&b).expect("regular");
        let mut yt = vec![0.0; ni + 2];
        for j in 1..=ni {
            yt[j] = sol[(m - 1) * ni + (j - 1)];
        }
        yt
    }
}

/// Reduced normal equations `(D + GᵀWG/ε) h = −GᵀW g₀/ε` over the leader
/// degrees of freedom, assembled column by column from the dense follower
/// system; independent of the leader adjoint.
fn dense_leader(problem: &NashProblem, epsilon: f64) -> SpaceTimeField {
    let grid = &problem.model.grid;
    let dense = DenseFollowers::new(problem);
    let ml = problem.model.mask(Region::Leader);
    let w = grid.space_weights();
    let dofs: Vec<(usize, usize)> = (0..grid.m())
        .flat_map(|k| (0..=grid.n()).filter(|&j| ml[j] > 0.0).map(move |j| (k, j)))
        .collect();
    let zero = SpaceTimeField::zeros(grid);
    let g0 = dense.terminal(problem, &zero, true);
    let cols: Vec<Vec<f64>> = dofs
        .iter()
        .map(|&(k, j)| {
            let mut e = SpaceTimeField::zeros(grid);
            e.set(k, j, 1.0);
            dense.terminal(problem, &e, false)
        })
        .collect();
    let nd = dofs.len();
    let mut a = DMatrix::<f64>::zeros(nd, nd);
    let mut b = DVector::<f64>::zeros(nd);
    for (r, &(k, j)) in dofs.iter().enumerate() {
        a[(r, r)] += grid.dt(k + 1) * w[j] * ml[j];
        for c in 0..nd {
            a[(r, c)] += row_inner(grid, &cols[r], &cols[c]) / epsilon;
        }
        b[r] = -row_inner(grid, &cols[r], &g0) / epsilon;
    }
    let sol = a.lu().solve(&b).expect("regular");
    let mut h = SpaceTimeField::zeros(grid);
    for (r, &(k, j)) in dofs.iter().enumerate() {
        h.set(k, j, sol[r]);
    }
    h
}

fn rel(a: &SpaceTimeField, b: &SpaceTimeField) -> f64 {
    a.zip_map(b, |x, y| x - y).max_abs() / b.max_abs().max(1e-300)
}

#[test]
fn gradient_matches_central_differences() {
    let problem = with_targets(presets::linear_problem(16, 16).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for eps in [1e-1, 1e-3] {
        let cfg = config(eps);
        for _ in 0..2 {
            let h = random_leader(&problem, &mut rng);
            let d = random_leader(&problem, &mut rng);
            let g = gradient(&problem, &h, &cfg).unwrap();
            let exact = control_inner(&problem, &g, &d);
            let step = 1e-3;
            let mut hp = h.clone();
            hp.axpy(step, &d);
            let mut hm = h.clone();
            hm.axpy(-step, &d);
            let fd = (eval_penalized(&problem, &hp, &cfg).unwrap() - eval_penalized(&problem, &hm, &cfg).unwrap()) / (2.0 * step);
            assert!((exact - fd).abs() <= 1e-5 * exact.abs().max(1e-12), "ε={eps}: {exact} vs {fd}");
        }
    }
}

#[test]
fn cg_matches_dense_normal_equations() {
    let problem = with_targets(presets::linear_problem(16, 16).unwrap());
    for eps in [1e-1, 1e-3] {
        let res = minimize_cg(&problem, &HumConfig { cg_tol: 1e-11, ..config(eps) }, None).unwrap();
        assert!(res.converged);
        let oracle = dense_leader(&problem, eps);
        let e = rel(&res.h, &oracle);
        assert!(e <= 1e-7, "ε={eps}: relative gap {e:e}");
    }
}

#[test]
fn cg_values_never_increase() {
    let problem = with_targets(presets::linear_problem(32, 32).unwrap());
    let res = minimize_cg(&problem, &config(1e-4), None).unwrap();
    assert!(res.converged);
    for w in res.log.windows(2) {
        assert!(w[1].value <= w[0].value * (1.0 + 1e-12), "{} -> {}", w[0].value, w[1].value);
    }
}

#[test]
fn leader_equals_adjoint_at_convergence() {
    let problem = presets::linear_problem(32, 32).unwrap();
    let res = minimize_cg(&problem, &config(1e-2), None).unwrap();
    assert!(res.converged);
    assert!(res.characterization_residual / (res.h_norm + 1.0) <= 1e-6);
    let rho = res.rho.masked(problem.model.mask(Region::Leader));
    let mut hr = res.h.clone();
    hr.axpy(-1.0, &rho);
    assert!(control_inner(&problem, &hr, &hr).sqrt() <= 1e-6);
}

#[test]
fn exhausted_iterations_are_flagged() {
    let problem = presets::linear_problem(16, 16).unwrap();
    let cfg = HumConfig {
        cg_tol: 1e-14,
        cg_max_iter: 1,
        ..config(1e-4)
    };
    let res = minimize_cg(&problem, &cfg, None).unwrap();
    assert!(!res.converged);
    assert_eq!(res.iterations, 1);
    assert!(res.value < res.log[0].value);
}

#[test]
fn zero_initial_datum_needs_no_control() {
    let mut problem = presets::linear_problem(16, 16).unwrap();
    problem.y0.iter_mut().for_each(|v| *v = 0.0);
    let res = minimize_cg(&problem, &config(1e-3), None).unwrap();
    assert!(res.converged);
    assert_eq!(res.iterations, 0);
    assert_eq!(res.h_norm, 0.0);
    assert_eq!(res.y_final_norm, 0.0);
}

#[test]
fn sweep_reports_rows_and_slope() {
    let problem = presets::linear_problem(16, 16).unwrap();
    let cfg = HumConfig {
        epsilon_list: vec![1e-1, 1e-2, 1e-3],
        ..HumConfig::default()
    };
    let s = epsilon_sweep(&problem, &cfg).unwrap();
    assert_eq!(s.rows.len(), 3);
    assert!(s.rows[0].running_slope.is_nan());
    assert!(s.rows.iter().all(|r| r.converged));
    assert!(s.rows.windows(2).all(|w| w[1].y_final_norm < w[0].y_final_norm));
    assert!(s.slope > 0.0 && s.slope < 1.0);
    assert!(s.h_ratio >= 1.0);
}

#[test]
fn zero_nonlinearity_matches_linear_pipeline() {
    let mut problem = presets::semilinear_problem(16, 16).unwrap();
    problem.dynamics = Dynamics::Semilinear {
        nl: Arc::new(Zero),
        picard: PicardOptions::default(),
    };
    let cfg = config(1e-2);
    let out = semilinear_stackelberg(&problem, &cfg, &OuterOptions::default()).unwrap();
    assert!(out.converged);
    assert_eq!(out.iterations(), 1);
    let linear = NashProblem {
        dynamics: Dynamics::Linear(CoupledCoefficients::zero(&problem.model.grid)),
        ..problem.clone()
    };
    let direct = minimize_cg(&linear, &cfg, None).unwrap();
    assert!(rel(&out.result.h, &direct.h) <= 1e-14);
}

#[test]
fn tanh_outer_loop_contracts() {
    let problem = presets::semilinear_problem(16, 16).unwrap();
    let out = semilinear_stackelberg(&problem, &config(1e-3), &OuterOptions::default()).unwrap();
    assert!(out.converged);
    assert!(out.residuals.windows(2).all(|w| w[1] < w[0]));
    let h0 = out.h_norms[0];
    assert!(out.h_norms.iter().all(|&h| h <= 2.0 * h0));
}

#[test]
fn outer_loop_rejects_linear_dynamics() {
    let problem = presets::linear_problem(16, 16).unwrap();
    assert!(semilinear_stackelberg(&problem, &config(1e-2), &OuterOptions::default()).is_err());
}

#[test]
fn invalid_penalty_is_a_config_error() {
    let problem = presets::linear_problem(16, 16).unwrap();
    let err = minimize_cg(&problem, &config(0.0), None).unwrap_err();
    assert!(err.is_config());
}

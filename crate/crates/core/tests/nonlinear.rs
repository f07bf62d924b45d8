use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sncontrol::domain::{build_grid, Grading, Model, Region, SpaceTimeField};
use sncontrol::nonlinear::{
    gauss_legendre, integral_means, picard_semilinear, validate_assumptions, Nonlinearity, PicardOptions,
    ProbeLattice, TanhSin, Zero,
};
use sncontrol::solver::{central_gradient, solve_forward, spatial_operator, DriftForm, LinearCoefficients, SourceSpec};

#[derive(Debug)]
struct Square;

impl Nonlinearity for Square {
    fn name(&self) -> &str {
        "square"
    }
    fn f(&self, s: f64, _: f64) -> f64 {
        s * s
    }
    fn d1(&self, s: f64, _: f64) -> f64 {
        2.0 * s
    }
    fn d2(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d11(&self, _: f64, _: f64) -> f64 {
        2.0
    }
    fn d12(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d22(&self, _: f64, _: f64) -> f64 {
        0.0
    }
}

#[derive(Debug)]
struct Shifted;

impl Nonlinearity for Shifted {
    fn name(&self) -> &str {
        "shifted"
    }
    fn f(&self, s: f64, _: f64) -> f64 {
        s + 1.0
    }
    fn d1(&self, _: f64, _: f64) -> f64 {
        1.0
    }
    fn d2(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d11(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d12(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d22(&self, _: f64, _: f64) -> f64 {
        0.0
    }
}

#[test]
fn default_nonlinearity_satisfies_assumptions() {
    let r = validate_assumptions(&TanhSin::default(), &ProbeLattice::default());
    assert!(r.pass(), "{r:?}");
    assert!(r.lipschitz_estimate_wide <= 0.6);
    assert!(r.m2_estimate_wide <= 1.2);
}

#[test]
fn square_fails_lipschitz() {
    let r = validate_assumptions(&Square, &ProbeLattice::default());
    assert!(r.h1);
    assert!(!r.h3);
    assert!(!r.pass());
}

#[test]
fn shifted_fails_origin() {
    let r = validate_assumptions(&Shifted, &ProbeLattice::default());
    assert!(!r.h1);
    assert_eq!(r.f_at_origin, 1.0);
}

#[test]
fn reconstruction_identity_on_random_points() {
    let nl = TanhSin::default();
    let rule = gauss_legendre(16);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let s: f64 = rng.random_range(-3.0..3.0);
        let p: f64 = rng.random_range(-3.0..3.0);
        let (f1, f2) = integral_means(&nl, s, p, &rule);
        assert!((nl.f(s, p) - f1 * s - f2 * p).abs() <= 1e-10);
    }
}

fn setup(n: usize, m: usize) -> (Model, SourceSpec, Vec<f64>) {
    let model = Model::default_on(build_grid(n, m, 1.0, Grading::Uniform).unwrap()).unwrap();
    let h = SpaceTimeField::constant(&model.grid, 5.0);
    let src = SourceSpec {
        leader: Some(h),
        ..SourceSpec::default()
    };
    let y0: Vec<f64> = model.grid.nodes().iter().map(|&x| (std::f64::consts::PI * x).sin()).collect();
    (model, src, y0)
}

#[test]
fn zero_nonlinearity_is_linear_solve() {
    let (model, src, y0) = setup(32, 32);
    let out = picard_semilinear(&Zero, &model, &src, &y0, &PicardOptions::default()).unwrap();
    assert_eq!(out.iterations(), 1);
    let lin = solve_forward(&model, &LinearCoefficients::zero(&model.grid, DriftForm::NonDivergence), &src, &y0).unwrap();
    assert_eq!(out.y, lin);
}

#[test]
fn picard_contracts_for_tanh() {
    let (model, src, y0) = setup(32, 32);
    let nl = TanhSin { c1: 0.5, c2: 0.0 };
    let out = picard_semilinear(&nl, &model, &src, &y0, &PicardOptions::default()).unwrap();
    let r = &out.residuals;
    for k in 2..r.len() {
        if r[k] < 1e-13 {
            break;
        }
        assert!(r[k] <= 0.5 * r[k - 1], "iteration {k}: {:?}", r);
    }
}

#[test]
fn picard_output_is_a_fixed_point() {
    let (model, src, y0) = setup(24, 24);
    let nl = TanhSin::default();
    let tol = 1e-10;
    let opts = PicardOptions { tol, ..PicardOptions::default() };
    let out = picard_semilinear(&nl, &model, &src, &y0, &opts).unwrap();
    let again = sncontrol::nonlinear::picard_from(&nl, &model, Some(&src.assemble(&model)), &y0, Some(&out.y), &PicardOptions {
        max_iter: 1,
        tol: 1.0,
        ..opts
    })
    .unwrap();
    assert!(again.residuals[0] <= tol);
}

/// Per-step Newton solve of the same fully implicit discrete system.
fn newton_oracle(nl: &dyn Nonlinearity, model: &Model, src: &SourceSpec, y0: &[f64]) -> SpaceTimeField {
    let grid = &model.grid;
    let n = grid.n();
    let x = grid.nodes();
    let f = src.assemble(model);
    let zero = vec![0.0; n + 1];
    let a = spatial_operator(model, &zero, &zero, DriftForm::NonDivergence);
    let mut adense = DMatrix::<f64>::zeros(n - 1, n - 1);
    for i in 0..n - 1 {
        adense[(i, i)] = a.diag[i];
        if i > 0 {
            adense[(i, i - 1)] = a.sub[i];
        }
        if i + 2 < n {
            adense[(i, i + 1)] = a.sup[i];
        }
    }
    let mut y = SpaceTimeField::zeros(grid);
    y.row_mut(0)[1..n].copy_from_slice(&y0[1..n]);
    for step in 1..=grid.m() {
        let dt = grid.dt(step);
        let prev: Vec<f64> = y.row(step - 1).to_vec();
        let mut u = prev.clone();
        for _ in 0..50 {
            let g = central_gradient(x, &u);
            let ui = DVector::from_iterator(n - 1, u[1..n].iter().copied());
            let au = &adense * &ui;
            let mut res = DVector::<f64>::zeros(n - 1);
            let mut jac = DMatrix::<f64>::identity(n - 1, n - 1) + &adense * dt;
            for i in 0..n - 1 {
                let j = i + 1;
                res[i] = u[j] - prev[j] + dt * (au[i] + nl.f(u[j], g[j])) - dt * f.get(step - 1, j);
                jac[(i, i)] += dt * nl.d1(u[j], g[j]);
                let w = dt * nl.d2(u[j], g[j]) / (x[j + 1] - x[j - 1]);
                if i + 2 < n {
                    jac[(i, i + 1)] += w;
                }
                if i > 0 {
                    jac[(i, i - 1)] -= w;
                }
            }
            let du = jac.lu().solve(&res).unwrap();
            for i in 0..n - 1 {
                u[i + 1] -= du[i];
            }
            if du.amax() < 1e-15 {
                break;
            }
        }
        y.row_mut(step).copy_from_slice(&u);
    }
    y
}

#[test]
fn picard_matches_newton_oracle() {
    let (model, src, y0) = setup(16, 16);
    let nl = TanhSin::default();
    let out = picard_semilinear(&nl, &model, &src, &y0, &PicardOptions { tol: 1e-14, ..PicardOptions::default() }).unwrap();
    let oracle = newton_oracle(&nl, &model, &src, &y0);
    let diff = out.y.zip_map(&oracle, |a, b| a - b).max_abs();
    assert!(diff <= 1e-8 * oracle.max_abs(), "diff {diff}");
    assert!(model.mask(Region::Leader).iter().any(|&m| m > 0.0));
}

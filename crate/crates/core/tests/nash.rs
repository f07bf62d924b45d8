mod common;

use common::{kkt_oracle, leader, random_on, rel, unit_on};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sncontrol::domain::{Levels, Region, SpaceTimeField};
use sncontrol::nash::{
    convexity_probe, eval_cost, solve_nash, stationarity_residual, CostConfig, Dynamics, NashOptions,
    FD_FIRST, FD_SECOND,
};
use sncontrol::nonlinear::{PicardOptions, Zero};
use sncontrol::presets;
use sncontrol::solver::CoupledCoefficients;
use std::sync::Arc;

#[test]
fn block_iteration_matches_monolithic_solve() {
    let mut problem = presets::linear_problem(16, 16).unwrap();
    let model = problem.model.clone();
    let yd = SpaceTimeField::from_fn(&model.grid, |t, x| t * x).masked(model.mask(Region::Observation));
    problem.cost = CostConfig::new(&model, [1.0, 2.0], [5.0, 8.0], [yd.clone(), yd.scaled(-1.0)]).unwrap();
    let h = leader(&problem);
    let sol = solve_nash(&problem, &h, &NashOptions { tol: 1e-13, ..NashOptions::default() }).unwrap();
    let (y, p) = kkt_oracle(&problem, &h);
    assert!(rel(&sol.y, &y) <= 1e-8);
    for i in 0..2 {
        assert!(rel(&sol.p[i], &p[i]) <= 1e-8);
        assert!(rel(&sol.v[i], &problem.control_from_adjoint(&p[i], i)) <= 1e-8);
    }
}

#[test]
fn zero_tracking_weights_decouple() {
    let mut problem = presets::linear_problem(24, 24).unwrap();
    problem.cost = CostConfig::tracking_zero(&problem.model, [0.0, 0.0], [100.0, 100.0]).unwrap();
    let h = leader(&problem);
    let sol = solve_nash(&problem, &h, &NashOptions::default()).unwrap();
    let zero = SpaceTimeField::zeros(&problem.model.grid);
    let alone = problem.state(&h, [&zero, &zero], None).unwrap();
    assert_eq!(sol.y, alone);
    for i in 0..2 {
        assert!(sol.v[i].values().iter().all(|&v| v == 0.0));
        assert!(sol.p[i].values().iter().all(|&v| v == 0.0));
    }
}

#[test]
fn symmetric_followers_coincide() {
    let mut problem = presets::linear_problem(24, 24).unwrap();
    let model = problem.model.clone();
    let omega = model.layout.interval(Region::Follower1);
    problem.model = sncontrol::domain::Model::new(
        model.grid.clone(),
        model.diffusion.clone(),
        model.beta.clone(),
        sncontrol::domain::ControlLayout::new(
            &model.grid,
            model.layout.interval(Region::Leader),
            omega,
            omega,
            model.layout.interval(Region::Observation),
        )
        .unwrap(),
    );
    let h = leader(&problem);
    let sol = solve_nash(&problem, &h, &NashOptions::default()).unwrap();
    assert_eq!(sol.p[0], sol.p[1]);
    assert_eq!(sol.v[0], sol.v[1]);
}

#[test]
fn elimination_identity_is_exact() {
    let problem = presets::semilinear_problem(24, 24).unwrap();
    let h = leader(&problem);
    let sol = solve_nash(&problem, &h, &NashOptions::default()).unwrap();
    for i in 0..2 {
        let mask = problem.model.mask(Region::follower(i));
        let mu = problem.cost.mu[i];
        for k in 0..sol.v[i].rows() {
            for j in 0..sol.v[i].cols() {
                let expect = if mask[j] > 0.0 { -(sol.p[i].get(k, j) * mask[j]) / mu } else { 0.0 };
                assert_eq!(sol.v[i].get(k, j), expect);
            }
        }
    }
}

#[test]
fn small_penalty_is_reported_as_divergence() {
    let mut problem = presets::linear_problem(24, 24).unwrap();
    problem.cost = CostConfig::tracking_zero(&problem.model, [1e4, 1e4], [1e-4, 1e-4]).unwrap();
    let h = leader(&problem);
    let err = solve_nash(&problem, &h, &NashOptions::default()).unwrap_err();
    assert!(matches!(err, sncontrol::Error::Divergence { .. }), "{err}");
}

#[test]
fn costs_of_simple_controls() {
    let mut problem = presets::linear_problem(20, 20).unwrap();
    problem.y0 = vec![0.0; 21];
    let zero = SpaceTimeField::zeros(&problem.model.grid);
    assert_eq!(eval_cost(&problem, 0, &zero, &zero, &zero).unwrap(), 0.0);
    problem.cost = CostConfig::tracking_zero(&problem.model, [0.0, 1.0], [2.0, 1.0]).unwrap();
    let ind = SpaceTimeField::constant(&problem.model.grid, 1.0).masked(problem.model.mask(Region::Follower1));
    let j1 = eval_cost(&problem, 0, &zero, &ind, &zero).unwrap();
    let grid = &problem.model.grid;
    let measure: f64 = grid.space_weights().iter().zip(problem.model.mask(Region::Follower1)).map(|(w, m)| w * m).sum();
    assert!((j1 - grid.horizon() * measure).abs() < 1e-14);
    assert!((measure - 0.15).abs() <= 2.0 / 20.0);
}

#[test]
fn equilibrium_beats_random_perturbations() {
    let problem = presets::semilinear_problem(24, 24).unwrap();
    let h = leader(&problem);
    let sol = solve_nash(&problem, &h, &NashOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..2 {
        let base = eval_cost(&problem, i, &h, &sol.v[0], &sol.v[1]).unwrap();
        for _ in 0..20 {
            let w = unit_on(&problem, i, &mut rng).scaled(rng.random_range(0.0..0.1));
            let mut v = sol.v.clone();
            v[i].axpy(1.0, &w);
            assert!(eval_cost(&problem, i, &h, &v[0], &v[1]).unwrap() >= base - 1e-14 * base.abs());
        }
    }
}

#[test]
fn derivative_routes_agree_off_equilibrium() {
    let problem = presets::semilinear_problem(24, 24).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = leader(&problem);
    let v = [random_on(&problem, Region::Follower1, &mut rng), random_on(&problem, Region::Follower2, &mut rng)];
    for i in 0..2 {
        let w = unit_on(&problem, i, &mut rng);
        let d = stationarity_residual(&problem, &h, [&v[0], &v[1]], &w, i, FD_FIRST).unwrap();
        assert!((d.tangent - d.fd).abs() <= 1e-4 * d.fd.abs(), "{d:?}");
        assert!((d.adjoint - d.fd).abs() <= 1e-4 * d.fd.abs(), "{d:?}");
    }
}

#[test]
fn pure_penalty_has_curvature_mu() {
    let mut problem = presets::linear_problem(16, 16).unwrap();
    problem.dynamics = Dynamics::Semilinear {
        nl: Arc::new(Zero),
        picard: PicardOptions::default(),
    };
    problem.cost = CostConfig::tracking_zero(&problem.model, [0.0, 0.0], [7.0, 7.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = leader(&problem);
    let zero = SpaceTimeField::zeros(&problem.model.grid);
    let w = unit_on(&problem, 0, &mut rng);
    let c = convexity_probe(&problem, &h, [&zero, &zero], &w, 0, FD_SECOND).unwrap();
    assert!((c.systems - 7.0).abs() < 1e-12, "{c:?}");
}

#[test]
fn linear_curvature_routes_agree() {
    let problem = presets::linear_problem(24, 24).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = leader(&problem);
    let sol = solve_nash(&problem, &h, &NashOptions::default()).unwrap();
    let w = unit_on(&problem, 1, &mut rng);
    let c = convexity_probe(&problem, &h, [&sol.v[0], &sol.v[1]], &w, 1, FD_SECOND).unwrap();
    assert!((c.systems - c.fd).abs() <= 1e-3 * c.systems.abs(), "{c:?}");
    assert!(c.systems >= problem.cost.mu[1] - c.margin.abs());
}

#[test]
fn follower_bound_is_stable() {
    let problem = presets::linear_problem(24, 24).unwrap();
    let grid = problem.model.grid.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut ratios = Vec::new();
    for _ in 0..20 {
        let mut p = problem.clone();
        let yd = [random_on(&p, Region::Observation, &mut rng), random_on(&p, Region::Observation, &mut rng)];
        p.cost = CostConfig::new(&p.model, [1.0, 1.0], [100.0, 100.0], yd).unwrap();
        let mut y0: Vec<f64> = (0..=grid.n()).map(|_| rng.random_range(-1.0..1.0)).collect();
        y0[0] = 0.0;
        y0[grid.n()] = 0.0;
        p.y0 = y0;
        let h = random_on(&p, Region::Leader, &mut rng);
        let sol = solve_nash(&p, &h, &NashOptions::default()).unwrap();
        let vnorm = (0..2)
            .map(|i| sol.v[i].norm(&grid, Some(p.model.mask(Region::follower(i))), Levels::Backward).powi(2))
            .sum::<f64>()
            .sqrt();
        let [t1, t2] = p.cost.target_norms(&grid);
        let data = t1 + t2 + h.norm(&grid, Some(p.model.mask(Region::Leader)), Levels::Backward)
            + sncontrol::domain::row_norm(&grid, &p.y0);
        ratios.push(vnorm / data);
    }
    let c = ratios[0];
    assert!(ratios.iter().all(|&r| r <= 2.0 * c), "{ratios:?}");
}

#[test]
fn coupled_coefficient_shapes() {
    let model = presets::model(8, 8).unwrap();
    let c = CoupledCoefficients::constant(&model, 1.0, 2.0, 3.0, 4.0);
    assert_eq!(c.state.drift.get(3, 8), 2.0);
    assert_eq!(c.follower.reaction.get(0, 0), 3.0);
}

mod common;

use common::{mms_error, model, random_interior};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sncontrol::domain::{weighted_h1a_norm_sq, Levels, Region, SpaceTimeField};
use sncontrol::solver::{
    march_backward, march_forward, solve_forward, DriftForm, LinearCoefficients, SourceSpec,
};
use std::f64::consts::PI;

#[test]
fn manufactured_solution_temporal_order() {
    let errs: Vec<f64> = [32, 64, 128].iter().map(|&m| mms_error(256, m, true, 0.0)).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 0.9, "temporal order {order}, errors {errs:?}");
    }
}

#[test]
fn manufactured_solution_spatial_order() {
    let errs: Vec<f64> = [32, 64, 128].iter().map(|&n| mms_error(n, 16, false, 0.1)).collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.5, "spatial order {order}, errors {errs:?}");
    }
}

#[test]
fn duality_on_several_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [16, 64, 128] {
        let model = model(n, n);
        let c = LinearCoefficients {
            reaction: random_interior(&model, &mut rng).map(|v| 1.0 + 0.5 * v),
            drift: random_interior(&model, &mut rng).map(|v| 0.2 * v),
            form: DriftForm::NonDivergence,
        };
        let f = random_interior(&model, &mut rng);
        let g = random_interior(&model, &mut rng);
        let zero = vec![0.0; n + 1];
        let y = march_forward(&model, &c, Some(&f), &zero).unwrap();
        let p = march_backward(&model, &c.adjoint(), Some(&g), &zero).unwrap();
        let lhs = f.inner(&p, &model.grid, None, Levels::Backward);
        let rhs = y.inner(&g, &model.grid, None, Levels::Forward);
        let scale = y.norm(&model.grid, None, Levels::Forward) * p.norm(&model.grid, None, Levels::Backward);
        assert!((lhs - rhs).abs() <= 1e-12 * scale, "n = {n}");
    }
}

#[test]
fn backward_is_forward_on_reversed_axis() {
    let model = model(20, 12);
    let grid = &model.grid;
    let m = grid.m();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = LinearCoefficients::constant(&model, 0.7, 0.4, DriftForm::Divergence);
    let g = random_interior(&model, &mut rng);
    let mut terminal: Vec<f64> = grid.nodes().iter().map(|&x| x * (1.0 - x)).collect();
    terminal[20] = 0.0;
    let p = march_backward(&model, &c, Some(&g), &terminal).unwrap();
    let mut reversed = SpaceTimeField::zeros(grid);
    for k in 0..=m {
        reversed.row_mut(k).copy_from_slice(g.row(m - k));
    }
    let q = march_forward(&model, &c, Some(&reversed), &terminal).unwrap();
    for k in 0..=m {
        for (a, b) in p.row(k).iter().zip(q.row(m - k)) {
            assert!((a - b).abs() <= 1e-14, "level {k}");
        }
    }
}

#[test]
fn energy_estimate_holds_with_shift_constant() {
    let model = model(48, 48);
    let grid = &model.grid;
    let n = grid.n();
    let l = 1.0;
    let c = LinearCoefficients::constant(&model, 0.5, 0.1, DriftForm::NonDivergence);
    let r = c.coercivity_shift(&model, l);
    let bound = (2.0 * r * grid.horizon()).exp();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut ratios = Vec::new();
    for _ in 0..20 {
        let h = random_interior(&model, &mut rng);
        let v1 = random_interior(&model, &mut rng);
        let v2 = random_interior(&model, &mut rng);
        let mut y0: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
        y0[0] = 0.0;
        y0[n] = 0.0;
        let src = SourceSpec {
            leader: Some(h.clone()),
            follower1: Some(v1.clone()),
            follower2: Some(v2.clone()),
            distributed: None,
        };
        let y = solve_forward(&model, &c, &src, &y0).unwrap();
        let mut lhs = sncontrol::domain::row_norm(grid, y.last_row()).powi(2);
        for k in 1..=grid.m() {
            lhs += grid.dt(k) * weighted_h1a_norm_sq(grid, y.row(k), &model.diffusion).unwrap();
        }
        let data = h.norm(grid, Some(model.mask(Region::Leader)), Levels::Backward).powi(2)
            + v1.norm(grid, Some(model.mask(Region::Follower1)), Levels::Backward).powi(2)
            + v2.norm(grid, Some(model.mask(Region::Follower2)), Levels::Backward).powi(2)
            + sncontrol::domain::row_norm(grid, &y0).powi(2);
        ratios.push(lhs / data);
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(max <= bound, "max ratio {max} vs e^(2rT) = {bound}");
}

#[test]
fn max_norm_does_not_grow_under_time_refinement() {
    let mut maxima = Vec::new();
    for m in [32, 64, 128] {
        let model = model(64, m);
        let c = LinearCoefficients::constant(&model, 1.0, 0.2, DriftForm::NonDivergence);
        let y0: Vec<f64> = model.grid.nodes().iter().map(|&x| (PI * x).sin()).collect();
        let y = solve_forward(&model, &c, &SourceSpec::none(), &y0).unwrap();
        maxima.push(y.max_abs());
    }
    for w in maxima.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12), "{maxima:?}");
    }
    assert!(maxima[0] <= 1.0 + 1e-12);
}

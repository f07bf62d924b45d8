#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sncontrol::domain::{build_grid, Grading, Levels, Model, Region, SpaceTimeField};
use sncontrol::nash::{Dynamics, NashProblem};
use sncontrol::solver::{march_forward, step_matrix, DriftForm, LinearCoefficients};
use std::f64::consts::PI;

pub fn model(n: usize, m: usize) -> Model {
    Model::default_on(build_grid(n, m, 1.0, Grading::Uniform).unwrap()).unwrap()
}

pub fn random_interior(model: &Model, rng: &mut ChaCha8Rng) -> SpaceTimeField {
    let n = model.grid.n();
    let mut f = SpaceTimeField::zeros(&model.grid);
    for k in 0..f.rows() {
        for j in 1..n {
            f.set(k, j, rng.random_range(-1.0..1.0));
        }
    }
    f
}

/// Dual-cell average of `g = ∂_t y* − (a y*_x)_x + y*` for
/// `y* = t sin(πx)`, `a = √x`. The flux term integrates exactly to the
/// difference of `a y*_x` at the cell faces.
pub fn mms_source_average(t: f64, lo: f64, hi: f64) -> f64 {
    let flux = |x: f64| x.sqrt() * PI * (PI * x).cos();
    let int_sin = ((PI * lo).cos() - (PI * hi).cos()) / PI;
    ((1.0 + t) * int_sin - t * (flux(hi) - flux(lo))) / (hi - lo)
}

/// Discrete `L²(Q)` error against `t sin(πx)` on nodes with `x ≥ x_min`.
/// With `lagged = false` the source is sampled at the new time level, which
/// removes the time error for this solution linear in `t`.
pub fn mms_error(n: usize, m: usize, lagged: bool, x_min: f64) -> f64 {
    let model = model(n, m);
    let grid = &model.grid;
    let x = grid.nodes();
    let shift = if lagged { 0.0 } else { grid.dt(1) };
    let mut g = SpaceTimeField::zeros(grid);
    for (k, &t) in grid.times().iter().enumerate() {
        for j in 1..n {
            let lo = 0.5 * (x[j - 1] + x[j]);
            let hi = 0.5 * (x[j] + x[j + 1]);
            g.set(k, j, mms_source_average(t + shift, lo, hi));
        }
    }
    let c = LinearCoefficients::constant(&model, 1.0, 0.0, DriftForm::NonDivergence);
    let y0 = vec![0.0; n + 1];
    let y = march_forward(&model, &c, Some(&g), &y0).unwrap();
    let exact = SpaceTimeField::from_fn(grid, |t, x| t * (PI * x).sin());
    let mask: Vec<f64> = x.iter().map(|&x| if x >= x_min { 1.0 } else { 0.0 }).collect();
    y.zip_map(&exact, |a, b| a - b).norm(grid, Some(&mask), Levels::Forward)
}

pub fn random_on(problem: &NashProblem, region: Region, rng: &mut ChaCha8Rng) -> SpaceTimeField {
    let grid = &problem.model.grid;
    let mut f = SpaceTimeField::zeros(grid);
    for k in 0..f.rows() {
        for j in 0..f.cols() {
            f.set(k, j, rng.random_range(-1.0..1.0));
        }
    }
    f.masked(problem.model.mask(region))
}

pub fn unit_on(problem: &NashProblem, i: usize, rng: &mut ChaCha8Rng) -> SpaceTimeField {
    let r = Region::follower(i);
    let w = random_on(problem, r, rng);
    let norm = w.norm(&problem.model.grid, Some(problem.model.mask(r)), Levels::Backward);
    w.scaled(1.0 / norm)
}

pub fn rel(a: &SpaceTimeField, b: &SpaceTimeField) -> f64 {
    a.zip_map(b, |x, y| x - y).max_abs() / b.max_abs().max(1e-300)
}

pub fn leader(problem: &NashProblem) -> SpaceTimeField {
    SpaceTimeField::from_fn(&problem.model.grid, |t, x| 3.0 * (1.0 - t) * (x - 0.55)).masked(problem.model.mask(Region::Leader))
}

/// Dense solve of the coupled state/adjoint system with `vⁱ` eliminated.
pub fn kkt_oracle(problem: &NashProblem, h: &SpaceTimeField) -> (SpaceTimeField, [SpaceTimeField; 2]) {
    let Dynamics::Linear(c) = &problem.dynamics else { panic!("linear only") };
    let model = &problem.model;
    let grid = &model.grid;
    let (n, m) = (grid.n(), grid.m());
    let ni = n - 1;
    let block = m * ni;
    let size = 3 * block;
    // y^n, n = 1..=M, at offset (n-1)*ni; p^i_k, k = 0..M-1, at (1+i)*block + k*ni.
    let yi = |n: usize, j: usize| (n - 1) * ni + (j - 1);
    let pi = |i: usize, k: usize, j: usize| (1 + i) * block + k * ni + (j - 1);
    let mut a = DMatrix::<f64>::zeros(size, size);
    let mut b = DVector::<f64>::zeros(size);
    let md = model.mask(Region::Observation);
    let ml = model.mask(Region::Leader);
    for step in 1..=m {
        let dt = grid.dt(step);
        let s = step_matrix(model, dt, c.state.reaction.row(step), c.state.drift.row(step), c.state.form);
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
            } else {
                b[r] += problem.y0[j];
            }
            b[r] += dt * ml[j] * h.get(step - 1, j);
            for i in 0..2 {
                let mi = model.mask(Region::follower(i))[j];
                if mi > 0.0 {
                    a[(r, pi(i, step - 1, j))] += dt * mi / problem.cost.mu[i];
                }
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
                let al = problem.cost.alpha[i] * md[j];
                a[(r, yi(k + 1, j))] -= dt * al;
                b[r] -= dt * al * problem.cost.targets[i].get(k + 1, j);
            }
        }
    }
    let sol = a.lu().solve(&b).expect("KKT matrix is regular");
    let mut y = SpaceTimeField::zeros(grid);
    y.row_mut(0).copy_from_slice(&problem.y0);
    let mut p = [SpaceTimeField::zeros(grid), SpaceTimeField::zeros(grid)];
    for j in 1..n {
        for step in 1..=m {
            y.set(step, j, sol[yi(step, j)]);
        }
        for i in 0..2 {
            for k in 0..m {
                p[i].set(k, j, sol[pi(i, k, j)]);
            }
        }
    }
    (y, p)
}


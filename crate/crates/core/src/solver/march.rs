use super::coeffs::{LinearCoefficients, SourceSpec};
use super::operator::step_matrix;
use crate::domain::{Model, SpaceTimeField};
use crate::error::{Error, Result};

fn check_row(model: &Model, row: &[f64], what: &str) -> Result<()> {
    let n = model.grid.n();
    if row.len() != n + 1 {
        return Err(Error::InvalidInput(format!("{what} has {} samples, grid has {}", row.len(), n + 1)));
    }
    if row.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} is not finite")));
    }
    let scale = row.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    if row[0].abs() > 1e-12 * scale || row[n].abs() > 1e-12 * scale {
        return Err(Error::InvalidInput(format!("{what} does not vanish at the endpoints")));
    }
    Ok(())
}

fn check_fields(model: &Model, coeffs: &LinearCoefficients, source: Option<&SpaceTimeField>) -> Result<()> {
    let grid = &model.grid;
    if !coeffs.reaction.fits(grid) || !coeffs.drift.fits(grid) {
        return Err(Error::InvalidInput("coefficient fields do not match the grid".into()));
    }
    if !coeffs.is_finite() {
        return Err(Error::InvalidInput("coefficients are not finite".into()));
    }
    if let Some(s) = source {
        if !s.fits(grid) {
            return Err(Error::InvalidInput("source field does not match the grid".into()));
        }
    }
    Ok(())
}

/// Implicit Euler forward march; level `n` uses coefficients at `t_n` and
/// the source at `t_{n-1}`.
pub fn march_forward(
    model: &Model,
    coeffs: &LinearCoefficients,
    source: Option<&SpaceTimeField>,
    y0: &[f64],
) -> Result<SpaceTimeField> {
    check_fields(model, coeffs, source)?;
    check_row(model, y0, "initial datum")?;
    let grid = &model.grid;
    let n = grid.n();
    let mut y = SpaceTimeField::zeros(grid);
    y.row_mut(0)[1..n].copy_from_slice(&y0[1..n]);
    let mut rhs = vec![0.0; n - 1];
    for step in 1..=grid.m() {
        let dt = grid.dt(step);
        let prev = y.row(step - 1);
        rhs.copy_from_slice(&prev[1..n]);
        if let Some(s) = source {
            for (r, v) in rhs.iter_mut().zip(&s.row(step - 1)[1..n]) {
                *r += dt * v;
            }
        }
        let b = step_matrix(model, dt, coeffs.reaction.row(step), coeffs.drift.row(step), coeffs.form);
        let sol = b.solve(&rhs)?;
        y.row_mut(step)[1..n].copy_from_slice(&sol);
    }
    Ok(y)
}

/// Backward march; level `k` uses coefficients and source at `t_{k+1}`.
/// With the drift form flipped this is the exact transpose of
/// [`march_forward`] in the pairing `Σ dt ⟨·,·⟩_W`.
pub fn march_backward(
    model: &Model,
    coeffs: &LinearCoefficients,
    source: Option<&SpaceTimeField>,
    terminal: &[f64],
) -> Result<SpaceTimeField> {
    check_fields(model, coeffs, source)?;
    check_row(model, terminal, "terminal datum")?;
    let grid = &model.grid;
    let (n, m) = (grid.n(), grid.m());
    let mut p = SpaceTimeField::zeros(grid);
    p.row_mut(m)[1..n].copy_from_slice(&terminal[1..n]);
    let mut rhs = vec![0.0; n - 1];
    for k in (0..m).rev() {
        let dt = grid.dt(k + 1);
        let next = p.row(k + 1);
        rhs.copy_from_slice(&next[1..n]);
        if let Some(s) = source {
            for (r, v) in rhs.iter_mut().zip(&s.row(k + 1)[1..n]) {
                *r += dt * v;
            }
        }
        let b = step_matrix(model, dt, coeffs.reaction.row(k + 1), coeffs.drift.row(k + 1), coeffs.form);
        let sol = b.solve(&rhs)?;
        p.row_mut(k)[1..n].copy_from_slice(&sol);
    }
    Ok(p)
}

pub fn solve_forward(model: &Model, coeffs: &LinearCoefficients, src: &SourceSpec, y0: &[f64]) -> Result<SpaceTimeField> {
    if src.is_empty() {
        march_forward(model, coeffs, None, y0)
    } else {
        march_forward(model, coeffs, Some(&src.assemble(model)), y0)
    }
}

pub fn solve_backward(
    model: &Model,
    coeffs: &LinearCoefficients,
    source: Option<&SpaceTimeField>,
    terminal: &[f64],
) -> Result<SpaceTimeField> {
    march_backward(model, coeffs, source, terminal)
}

/// Pointwise `e^{-r t} y(t, x)`.
pub fn apply_exp_shift(y: &SpaceTimeField, times: &[f64], r: f64) -> SpaceTimeField {
    let mut out = y.clone();
    for (k, &t) in times.iter().enumerate() {
        let f = (-r * t).exp();
        for v in out.row_mut(k) {
            *v *= f;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_grid, Grading, Levels};
    use crate::solver::DriftForm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(model: &Model, rng: &mut ChaCha8Rng) -> SpaceTimeField {
        let mut f = SpaceTimeField::zeros(&model.grid);
        let n = model.grid.n();
        for k in 0..f.rows() {
            for j in 1..n {
                f.set(k, j, rng.random_range(-1.0..1.0));
            }
        }
        f
    }

    #[test]
    fn zero_data_gives_zero() {
        let model = Model::default_on(build_grid(8, 8, 1.0, Grading::Uniform).unwrap()).unwrap();
        let c = LinearCoefficients::constant(&model, 1.0, 0.3, DriftForm::NonDivergence);
        let y0 = vec![0.0; 9];
        let y = solve_forward(&model, &c, &SourceSpec::none(), &y0).unwrap();
        assert!(y.values().iter().all(|&v| v == 0.0));
        let p = solve_backward(&model, &c.adjoint(), None, &y0).unwrap();
        assert!(p.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_nonzero_endpoint() {
        let model = Model::default_on(build_grid(8, 8, 1.0, Grading::Uniform).unwrap()).unwrap();
        let c = LinearCoefficients::zero(&model.grid, DriftForm::NonDivergence);
        let mut y0 = vec![0.0; 9];
        y0[0] = 1.0;
        assert!(solve_forward(&model, &c, &SourceSpec::none(), &y0).is_err());
    }

    #[test]
    fn duality_with_variable_coefficients() {
        let model = Model::default_on(build_grid(12, 10, 1.0, Grading::GradedLeft { power: 1.5 }).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = LinearCoefficients {
            reaction: random_field(&model, &mut rng).map(|v| 1.0 + v),
            drift: random_field(&model, &mut rng),
            form: DriftForm::NonDivergence,
        };
        let f = random_field(&model, &mut rng);
        let g = random_field(&model, &mut rng);
        let zero = vec![0.0; 13];
        let y = march_forward(&model, &c, Some(&f), &zero).unwrap();
        let p = march_backward(&model, &c.adjoint(), Some(&g), &zero).unwrap();
        let lhs = f.inner(&p, &model.grid, None, Levels::Backward);
        let rhs = y.inner(&g, &model.grid, None, Levels::Forward);
        assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0));
    }

    #[test]
    fn exp_shift_halves_at_ln2() {
        let grid = build_grid(4, 4, 1.0, Grading::Uniform).unwrap();
        let y = SpaceTimeField::constant(&grid, 1.0);
        let z = apply_exp_shift(&y, grid.times(), std::f64::consts::LN_2);
        assert!(z.last_row().iter().all(|v| (v - 0.5).abs() < 1e-15));
        let back = apply_exp_shift(&z, grid.times(), -std::f64::consts::LN_2);
        assert!(back.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert_eq!(apply_exp_shift(&y, grid.times(), 0.0), y);
    }
}

use super::quadrature::{gauss_legendre, integral_means, DEFAULT_ORDER};
use super::Nonlinearity;

/// Square lattice `[-radius, radius]²` with `points` samples per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeLattice {
    pub radius: f64,
    pub points: usize,
}

impl Default for ProbeLattice {
    fn default() -> Self {
        ProbeLattice {
            radius: 8.0,
            points: 41,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AssumptionReport {
    /// `F(0, 0) = 0`.
    pub h1: bool,
    /// Sampled Lipschitz quotients are bounded and below any declared `K`.
    pub h3: bool,
    pub h4: bool,
    pub h6: bool,
    pub f_at_origin: f64,
    /// Largest sampled Lipschitz quotient on the lattice.
    pub lipschitz_estimate: f64,
    /// Same on the lattice of twice the radius.
    pub lipschitz_estimate_wide: f64,
    pub declared_lipschitz: Option<f64>,
    /// Largest of `|D₁F| + |D₂F|` and the second derivatives.
    pub m2_estimate: f64,
    pub m2_estimate_wide: f64,
    pub reconstruction_error: f64,
}

impl AssumptionReport {
    pub fn pass(&self) -> bool {
        self.h1 && self.h3 && self.h4 && self.h6
    }
}

const QUOTIENT_TOL: f64 = 1e-6;
const GROWTH_FACTOR: f64 = 1.5;
// Order-16 rules lose accuracy on steep integrands such as sech²(8r).
const RECONSTRUCTION_TOL: f64 = 1e-6;

struct Scan {
    lipschitz: f64,
    m2: f64,
    reconstruction: f64,
}

fn scan(nl: &dyn Nonlinearity, radius: f64, points: usize) -> Scan {
    let rule = gauss_legendre(DEFAULT_ORDER);
    let step = 2.0 * radius / (points - 1) as f64;
    let coord = |i: usize| -radius + step * i as f64;
    let f0 = nl.f(0.0, 0.0);
    let mut out = Scan {
        lipschitz: 0.0,
        m2: 0.0,
        reconstruction: 0.0,
    };
    for i in 0..points {
        for k in 0..points {
            let (s, p) = (coord(i), coord(k));
            let f = nl.f(s, p);
            for (ds, dp) in [(step, 0.0), (0.0, step), (step, step), (step, -step)] {
                let (s2, p2) = (s + ds, p + dp);
                if s2 > radius + 1e-12 || p2.abs() > radius + 1e-12 {
                    continue;
                }
                let q = (nl.f(s2, p2) - f).abs() / ds.hypot(dp);
                out.lipschitz = out.lipschitz.max(q);
            }
            let first = nl.d1(s, p).abs() + nl.d2(s, p).abs();
            let second = [nl.d11(s, p), nl.d12(s, p), nl.d21(s, p), nl.d22(s, p)]
                .iter()
                .fold(0.0_f64, |m, v| m.max(v.abs()));
            out.m2 = out.m2.max(first).max(second);
            let (f1, f2) = integral_means(nl, s, p, &rule);
            let scale = 1.0 + f.abs();
            out.reconstruction = out.reconstruction.max((f - f0 - f1 * s - f2 * p).abs() / scale);
        }
    }
    out
}

/// Checks `H1`, `H3`, `H4` and `H6` on a probe lattice. Boundedness is
/// judged by rescanning on a lattice of twice the radius: a sampled bound
/// that grows by more than half is reported as unbounded.
pub fn validate_assumptions(nl: &dyn Nonlinearity, probe: &ProbeLattice) -> AssumptionReport {
    assert!(probe.points >= 2 && probe.radius > 0.0, "degenerate probe lattice");
    let narrow = scan(nl, probe.radius, probe.points);
    let wide = scan(nl, 2.0 * probe.radius, 2 * probe.points - 1);
    let f_at_origin = nl.f(0.0, 0.0);
    let declared = nl.lipschitz();
    let bounded_l = wide.lipschitz <= GROWTH_FACTOR * narrow.lipschitz.max(f64::MIN_POSITIVE);
    let below_declared = declared.is_none_or(|k| wide.lipschitz <= k * (1.0 + QUOTIENT_TOL));
    let bounded_m2 = wide.m2 <= GROWTH_FACTOR * narrow.m2.max(f64::MIN_POSITIVE);
    AssumptionReport {
        h1: f_at_origin == 0.0,
        h3: (bounded_l && below_declared) || wide.lipschitz == 0.0,
        h4: narrow.reconstruction <= RECONSTRUCTION_TOL,
        h6: bounded_m2 || wide.m2 == 0.0,
        f_at_origin,
        lipschitz_estimate: narrow.lipschitz,
        lipschitz_estimate_wide: wide.lipschitz,
        declared_lipschitz: declared,
        m2_estimate: narrow.m2,
        m2_estimate_wide: wide.m2,
        reconstruction_error: narrow.reconstruction,
    }
}

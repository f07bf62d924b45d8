use super::Nonlinearity;

pub const DEFAULT_ORDER: usize = 16;

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(q >= 1, "quadrature order must be positive");
    let mut nodes = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..q.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(q, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(q, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[q - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[q - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// `P_q(x)` and `P_q'(x)` by the three-term recurrence.
fn legendre(q: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=q {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if q == 0 { 1.0 } else { p1 };
    let d = q as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// `F₁ = ∫₀¹ D₁F(rs, rp) dr` and `F₂ = ∫₀¹ D₂F(rs, rp) dr`.
pub fn integral_means(nl: &dyn Nonlinearity, s: f64, p: f64, rule: &(Vec<f64>, Vec<f64>)) -> (f64, f64) {
    let (nodes, weights) = rule;
    let mut f1 = 0.0;
    let mut f2 = 0.0;
    for (&r, &w) in nodes.iter().zip(weights) {
        f1 += w * nl.d1(r * s, r * p);
        f2 += w * nl.d2(r * s, r * p);
    }
    (f1, f2)
}

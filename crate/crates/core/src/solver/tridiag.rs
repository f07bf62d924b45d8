use crate::error::{Error, Result};

/// Square tridiagonal matrix stored by diagonals; `sub[0]` and
/// `sup[n-1]` are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Tridiagonal {
            sub: vec![0.0; n],
            diag: vec![0.0; n],
            sup: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.sub[i] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.sup[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Adjoint with respect to the weighted product `Σ wᵢ uᵢ vᵢ`, i.e.
    /// `W⁻¹ Aᵀ W`.
    pub fn weighted_adjoint(&self, w: &[f64]) -> Tridiagonal {
        let n = self.len();
        let mut out = Tridiagonal::zeros(n);
        for i in 0..n {
            out.diag[i] = self.diag[i];
            if i > 0 {
                out.sub[i] = w[i - 1] * self.sup[i - 1] / w[i];
            }
            if i + 1 < n {
                out.sup[i] = w[i + 1] * self.sub[i + 1] / w[i];
            }
        }
        out
    }

    /// Thomas algorithm. Fails on a vanishing pivot.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut pivot = self.diag[0];
        check_pivot(0, pivot)?;
        c[0] = self.sup[0] / pivot;
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = self.diag[i] - self.sub[i] * c[i - 1];
            check_pivot(i, pivot)?;
            if i + 1 < n {
                c[i] = self.sup[i] / pivot;
            }
            d[i] = (rhs[i] - self.sub[i] * d[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }
}

fn check_pivot(row: usize, pivot: f64) -> Result<()> {
    if pivot.is_finite() && pivot.abs() > 1e-300 {
        Ok(())
    } else {
        Err(Error::SingularSystem { row, pivot })
    }
}

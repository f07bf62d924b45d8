use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular tridiagonal system at row {row} (pivot {pivot:e})")]
    SingularSystem { row: usize, pivot: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("{what} diverged at iteration {iteration} (residual {residual:e})")]
    Divergence {
        what: &'static str,
        iteration: usize,
        residual: f64,
    },

    #[error("configuration error in `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("empty parameter interval I = [{lower}, {upper}]")]
    EmptyInterval { lower: f64, upper: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::InvalidGrid(_) | Error::InvalidInput(_)
        )
    }
}

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol value {value} at {point:?} lies outside [0, 1]")]
    Range { value: f64, point: Vec<f64> },

    #[error("symbol evaluated to a non-finite value at {point:?}")]
    NonFinite { point: Vec<f64> },

    #[error("quadrature did not converge: estimate {value:e}, error estimate {error:e} > tolerance {tol:e}")]
    Quadrature { value: f64, error: f64, tol: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigen-decomposition failed: {0}")]
    Eigen(String),

    #[error("minimax exchange failed after {iterations} iterations: {message} (last level {level:e}, spread {spread:e})")]
    Solver {
        message: String,
        iterations: usize,
        level: f64,
        spread: f64,
    },

    #[error("certified bound violated: |error| = {error:e} > bound {bound:e} + slack {slack:e}")]
    BoundViolation { error: f64, bound: f64, slack: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors caused by user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Io(_) | Error::Csv(_) | Error::InvalidArgument(_)
        )
    }
}

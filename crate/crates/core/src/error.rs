use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum FemError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{family} elements on the {shape} are not covered by the template construction")]
    NotCovered { family: String, shape: String },

    #[error("quadrature degree {requested} is above the maximum {max} available in {dim}D")]
    DegreeTooHigh { requested: usize, max: usize, dim: usize },

    #[error("solver stopped after {iterations} iterations with relative residual {residual:.3e}")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("sparse factorization failed: {0}")]
    Factorization(String),

    #[error("unsupported element pairing: {0}")]
    Pairing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FemError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(FemError::Domain(msg.into()))
}

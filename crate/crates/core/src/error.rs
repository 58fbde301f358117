use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge within {iterations} iterations (best estimate {best})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        best: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integral diverges: {0}")]
    Divergence(String),

    #[error("degenerate quantity: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("observation {index} ({value}) lies outside the support")]
    OutsideSupport { index: usize, value: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

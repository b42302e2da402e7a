use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("{what} did not converge: {detail}")]
    NoConvergence { what: &'static str, detail: String },

    #[error("integer overflow in group arithmetic")]
    Overflow,

    #[error("distribution support exceeds {limit} elements")]
    SupportTooLarge { limit: usize },

    #[error("connection is not flat (residual {residual:e})")]
    NotFlat { residual: f64 },

    #[error("path is not closed (endpoint gap {gap:e})")]
    NotClosed { gap: f64 },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for failures of an iterative or quadrature method, as opposed
    /// to bad input.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::hadamard::NormResult;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("resource guard: {0}")]
    Resource(String),

    /// Power iteration hit its iteration cap. The partial result is still a
    /// valid lower bound through its witness.
    #[error(
        "power iteration did not converge: residual {:.3e} after {} iterations (norm >= {:.17})",
        .0.residual, .0.iterations, .0.norm
    )]
    NoConvergence(Box<NormResult>),

    #[error("quadrature did not reach tolerance: estimate {estimate:.17}, last change {last_change:.3e}")]
    Quadrature { estimate: f64, last_change: f64 },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

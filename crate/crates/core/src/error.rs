use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not self-adjoint in the weighted inner product (defect {defect:e})")]
    NotSelfAdjoint { defect: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is singular to working tolerance (pivot {pivot:e} at column {column})")]
    Singular { pivot: f64, column: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("graph is disconnected (kernel dimension {kernel_dim})")]
    DisconnectedGraph { kernel_dim: usize },

    #[error("point {0} lies on or too close to the spectrum")]
    OnSpectrum(String),

    #[error("operator has no spectral form; use the contour route")]
    NoSpectralForm,

    #[error("symbol cannot be evaluated at {0}")]
    SymbolDomain(String),

    #[error("symbol has no decay certificate")]
    MissingDecayCertificate,

    #[error("quadrature tail {tail:e} exceeds tolerance {tol:e}")]
    TailTooLarge { tail: f64, tol: f64 },

    #[error("norm estimate unstable under refinement: {coarse} vs {fine}")]
    UnstableEstimate { coarse: f64, fine: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("sample {index}: {source}")]
    Sample { index: usize, source: Box<Error> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}

//! Crate-wide error type.

/// Errors produced by the numerical kernels, the dynamics engine, and the
/// equilibrium solver.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("learning rate {eta} outside the stability region |eta| < {bound}")]
    StabilityViolation { eta: f64, bound: f64 },

    #[error("matrix is not symmetric positive definite (eigenvalue {0})")]
    NotPositiveDefinite(f64),

    #[error("eigenvalue/singular-value solver failed to converge")]
    EigenFailure,

    #[error("operation undefined for the zero matrix")]
    ZeroMatrix,

    #[error("overflow to non-finite values at step {step}")]
    Overflow { step: usize },

    #[error("iterate diverged (coordinate above {limit:e}) at step {step}")]
    Divergence { step: usize, limit: f64 },

    #[error("t = {t} exceeds the binomial-weight cap {cap}")]
    WeightCap { t: usize, cap: usize },

    #[error("rate measurement unreliable: {0}")]
    MeasurementUnreliable(&'static str),

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("linear program is unbounded")]
    LpUnbounded,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

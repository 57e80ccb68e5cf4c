use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("support radius {radius} exceeds the periodization guard limit {limit}")]
    SupportExceedsGuard { radius: f64, limit: f64 },

    #[error("boundary guard violated: {0}")]
    GuardViolated(String),

    #[error("aliasing: {fraction:.3e} of the spectral mass sits in the top decile of frequencies (limit {limit:.1e})")]
    Aliasing { fraction: f64, limit: f64 },

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("ill-conditioned least-squares design (condition number {0:.3e})")]
    IllConditioned(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

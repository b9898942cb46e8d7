use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval ({r}, {big_r}]: need 0 < r < R < inf")]
    InvalidInterval { r: f64, big_r: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model `{0}` has no explicit zero list")]
    NoZeroList(String),

    #[error("zero of the model lies exactly on the integration endpoint {0}")]
    ZeroAtEndpoint(f64),

    #[error("adaptive quadrature on [{a}, {b}] did not reach tolerance (error estimate {err:e})")]
    QuadratureFailed { a: f64, b: f64, err: f64 },

    #[error("non-finite value {value} at {at}")]
    NonFinite { at: f64, value: f64 },

    #[error("estimator range is empty: {0}")]
    EmptyRange(String),

    #[error("profile `{0}` has no declared tail behavior")]
    UndeclaredTail(String),

    #[error("tail supremum is infinite for `{0}`")]
    UnboundedTail(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Checks `0 < r < R < inf`.
pub(crate) fn check_interval(r: f64, big_r: f64) -> Result<()> {
    if r > 0.0 && r < big_r && big_r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInterval { r, big_r })
    }
}

use thiserror::Error;

/// Errors raised by instance construction and the dual-side evaluators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient `{name}` must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("coefficient `{name}` is not finite ({value})")]
    NotFinite { name: &'static str, value: f64 },

    #[error("`{field}` has length {found}, expected {expected}")]
    DimensionMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("sigma = {sigma} is a pole of the dual map (|sigma*tau(sigma)| = {magnitude:e})")]
    Pole { sigma: f64, magnitude: f64 },

    #[error("operation requires n = 1, instance has n = {n}")]
    NotUnivariate { n: usize },

    #[error("operation requires h = 0")]
    NonZeroLinearTerm,

    #[error("operation requires h != 0")]
    ZeroLinearTerm,

    #[error("tolerance breach: {what} = {value:e} exceeds {limit:e}")]
    ToleranceBreach {
        what: &'static str,
        value: f64,
        limit: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

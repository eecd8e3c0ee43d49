use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("exponent {0} is not a multiple of 1/4")]
    OffGridExponent(f64),

    #[error("constant term is not an invertible scalar")]
    NonInvertibleConstant,

    #[error("logarithm of a series with zero constant term")]
    LogOfZero,

    #[error("fractional residual exponent {0}/4 after normalization")]
    FractionalExponent(i32),

    #[error("coefficient index {index} outside 0..={order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("rank deficient family at member {index} (residual ratio {ratio:e})")]
    RankDeficient { index: usize, ratio: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("imaginary residue {residue:e} exceeds threshold for n = {n}")]
    ImaginaryResidue { n: usize, residue: f64 },

    #[error("kernel leading exponent {found}/4, expected {expected}/4")]
    LeadingExponent { found: i32, expected: i32 },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Input-validation errors map to CLI exit code 2, numerical failures to 3.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidInput(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("extension degree must be at least 1, got {0}")]
    BadExtensionDegree(u32),

    #[error("invalid field modulus: {0}")]
    InvalidModulus(String),

    #[error("field of size {size} exceeds the supported maximum {max}")]
    FieldTooLarge { size: u64, max: u64 },

    #[error("operands belong to different fields")]
    ContextMismatch,

    #[error("division by zero")]
    DivisionByZero,

    #[error("operation requires a nonzero polynomial")]
    ZeroPolynomial,

    #[error("operation requires a non-constant polynomial")]
    ConstantPolynomial,

    #[error("polynomial {0} is not monic")]
    NotMonic(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{what} would need {needed} items, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: String,
        cap: u64,
    },

    #[error("multi-index norm {norm} does not match size {size}")]
    NormMismatch { norm: usize, size: usize },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("symbol expansion exceeds {limit} terms; use the factored evaluator instead")]
    TermLimit { limit: usize },

    #[error("series has a nonzero constant term, exp is not defined in the truncated ring")]
    NotNilpotent,

    #[error("count {0} is not an integer")]
    NonIntegral(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub(crate) fn cap_exceeded(what: &'static str, needed: impl ToString, cap: u64) -> Error {
    Error::CapExceeded {
        what,
        needed: needed.to_string(),
        cap,
    }
}

use thiserror::Error;

/// Errors raised by the numeric kernels and the simulation harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NonHermitian { asymmetry: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("hypothesis count {count} exceeds cap {cap}")]
    HypothesisCapExceeded { count: u128, cap: u128 },

    #[error("unsupported constellation order {0} (expected 4 or 16)")]
    UnsupportedOrder(usize),

    #[error("unsupported code rate {0} (expected 0.33, 0.50 or 0.83)")]
    InvalidRate(f64),

    #[error("unknown combining scheme `{0}`")]
    UnknownScheme(String),

    #[error("invalid code parameters: {0}")]
    InvalidCode(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

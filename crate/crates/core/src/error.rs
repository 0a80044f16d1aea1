use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operation requires {expected} architecture")]
    WrongArchitecture { expected: &'static str },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("vehicles {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),

    #[error("transfer function is improper (numerator degree {num} > denominator degree {den})")]
    Improper { num: usize, den: usize },

    #[error("transfer function must be strictly proper")]
    NotStrictlyProper,

    #[error("evaluation at a pole (s = {re} + {im}i)")]
    AtPole { re: f64, im: f64 },

    #[error("degenerate denominator")]
    DegenerateDenominator,

    #[error("pole residual {residual:e} exceeds tolerance")]
    PoleResidual { residual: f64 },

    #[error("empty set")]
    Empty,

    #[error("signals are on different grids ({0} vs {1} samples)")]
    GridMismatch(usize, usize),

    #[error("indeterminate fit: boundary outputs coincide on the window")]
    IndeterminateFit,

    #[error("error-minimization rounding needs a fit context")]
    MissingContext,

    #[error("driver state was sized for dt = {expected}, got {actual}")]
    DtMismatch { expected: f64, actual: f64 },

    #[error("scenario: {0}")]
    Scenario(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

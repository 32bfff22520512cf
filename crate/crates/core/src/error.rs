use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable x{index} out of range for arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },
    #[error("scale factor {0} outside [0,1]")]
    ScaleOutOfRange(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point component {0} outside [0,1]")]
    PointOutOfRange(String),
    #[error("scalar kind mismatch: {0}")]
    KindMismatch(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("output range not contained in [0,1]: bounds [{lower}, {upper}]")]
    RangeViolation { lower: String, upper: String },
    #[error("logic {logic} cannot express {kind} weights")]
    UnsupportedLogic { logic: String, kind: String },
    #[error("least common multiple of denominators is {required}, above the cap {cap}")]
    LcmCapExceeded { required: String, cap: u64 },
    #[error("coefficient magnitude {magnitude} above the cap {cap}")]
    MagnitudeCapExceeded { magnitude: f64, cap: f64 },
    #[error("non-finite weight")]
    NonFinite,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("equivalence check failed: {0}")]
    NotEquivalent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

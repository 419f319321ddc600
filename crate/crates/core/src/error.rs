use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("moment sequence is empty")]
    EmptySequence,

    #[error("moment sequence must start with a0 = 1, found {0}")]
    NotUnital(String),

    #[error("class width h must be positive, got {0}")]
    NonPositiveWidth(String),

    #[error("lattice divisor m must be at least 1, got {0}")]
    InvalidDivisor(i64),

    #[error("requested order {requested} exceeds available order {available}")]
    OrderTooHigh { requested: usize, available: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("moment tensor is missing index {0:?}")]
    MissingIndex(Vec<usize>),

    #[error("moment tensor index {0:?} is out of range or duplicated")]
    UnexpectedIndex(Vec<usize>),

    #[error("histogram needs at least 2 classes, got {0}")]
    TooFewClasses(usize),

    #[error("midpoints must be strictly ascending and equally spaced (class {index}: spacing {found}, expected {expected})")]
    UnequalSpacing {
        index: usize,
        found: String,
        expected: String,
    },

    #[error("frequencies must be non-negative, found {0}")]
    NegativeFrequency(String),

    #[error("frequencies must sum to 1, found {0}")]
    NotNormalized(String),

    #[error("length mismatch: {what} has {left} entries but {right} were expected")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("sample is empty")]
    EmptySample,

    #[error("number of Monte Carlo trials must be at least 1")]
    NoTrials,

    #[error("quadrature did not converge: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    QuadratureFailed { estimate: f64, tolerance: f64 },

    #[error("density tail did not vanish within {0} steps; moments may not exist")]
    TailNotConverged(usize),

    #[error("invalid support: {0}")]
    InvalidSupport(String),

    #[error("parse error: {0}")]
    Parse(String),
}

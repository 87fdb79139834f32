use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("class is not a unit (constant term {0})")]
    NonUnit(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An Euler characteristic or Chern class that must be integral came out
    /// fractional. This always indicates a bug.
    #[error("arithmetic fault: {0}")]
    ArithmeticFault(String),

    #[error("exterior power {k} exceeds rank {rank}")]
    WedgeOutOfRange { k: usize, rank: usize },

    #[error("bilinear form is singular")]
    SingularForm,

    #[error("degree mismatch: expected bidegree {expected:?}, found {found:?}")]
    DegreeMismatch {
        expected: (i64, i64),
        found: (i64, i64),
    },

    #[error("no feasible assignment: {0}")]
    Infeasible(String),

    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),

    #[error("sampling exhausted after {0} attempts")]
    SamplingExhausted(usize),

    #[error("{q} is not a power of the characteristic {p}")]
    NotCharacteristicPower { q: u64, p: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

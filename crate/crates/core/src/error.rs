use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pfaffian of odd dimension {0}")]
    OddDimension(usize),
    #[error("dimension {n} exceeds the brute-force limit {limit}")]
    OracleLimit { n: usize, limit: usize },
    #[error("index {index} out of range for dimension {n}")]
    BadIndex { index: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("leading 2x2 block is singular (entry (1,2) is zero)")]
    SingularBlock,
    #[error("leading pfaffian minor of size {}", 2 * .s)]
    SingularLeadingMinor { s: usize },
    #[error("group action undefined: C*theta + D is singular")]
    UndefinedAction,
    #[error("group action needs inversion of a non-rational pivot")]
    SymbolicInversion,
    #[error("super-increasing sequence has {have} terms, need {need}")]
    SeqTooShort { have: usize, need: usize },
    #[error("not a super-increasing sequence: {0}")]
    BadSequence(String),
    #[error("precision exhausted; tightest interval [{lo}, {hi}]")]
    PrecisionExhausted { lo: String, hi: String },
    #[error("bad enclosure: {0}")]
    BadEnclosure(String),
    #[error("isomorphism matrix must fix the unit class: {0}")]
    BadIsoMatrix(String),
    #[error("positivity certificate still failing after {rounds} rounds")]
    ScheduleIncomplete { rounds: usize },
    #[error("theta12 = {0} must lie in (1/2, 1)")]
    BadTheta(f64),
    #[error("quadrature did not converge: {0}")]
    QuadFail(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

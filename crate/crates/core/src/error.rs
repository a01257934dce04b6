use num_bigint::BigInt;
use num_rational::Rational64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument must be a positive integer, got 0")]
    ZeroArgument,

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("series constant term {0} is not a unit")]
    NonUnitConstantTerm(BigInt),

    #[error("precision exceeded: {0}")]
    PrecisionExceeded(String),

    #[error("exponent {exponent} is incompatible with denominator {denom}")]
    IncompatibleExponent { exponent: Rational64, denom: u64 },

    #[error("singular curve: discriminant vanishes")]
    SingularCurve,

    #[error("model is not minimal at p = {0}")]
    NonMinimalModel(u64),

    #[error("unsupported reduction at p = {p}: {reason}")]
    UnsupportedReduction { p: u64, reason: &'static str },

    #[error("series is not of the form q + O(q^2)")]
    NonMonicSeries,

    #[error("exponent g_{0} is not integral (internal error)")]
    InternalIntegralityFailure(usize),

    #[error("block pattern mismatch: {0}")]
    BlockMismatch(String),

    #[error("exponent sequence is identically zero")]
    ZeroSequence,

    #[error("invalid arguments: {0}")]
    InvalidArgs(String),

    #[error("table mismatch for conductor {conductor} at a_{index}: printed {printed}, computed {computed}")]
    TableMismatch {
        conductor: u64,
        index: usize,
        printed: BigInt,
        computed: BigInt,
    },

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("schema violation: {0}")]
    SchemaViolation(String),

    #[error("no registry record for level {0}")]
    UnknownLevel(u64),

    #[error("search space too large: {0}")]
    SearchSpaceTooLarge(String),

    #[error("network unavailable: {0}")]
    NetworkUnavailable(String),

    #[error("label not found: {0}")]
    NotFound(String),

    #[error("could not parse remote payload: {message}")]
    ParseFailure { message: String, raw: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("exponent overflow while combining factored values")]
    ExponentOverflow,

    #[error("{num} is not divisible by {den}")]
    NotDivisible { num: String, den: String },

    #[error("spf sieve limit {requested} exceeds the memory budget of {budget} entries")]
    SieveBudget { requested: u64, budget: u64 },

    #[error("spf sieve covers 2..={limit} but the step needs {needed}")]
    SieveTooSmall { limit: u64, needed: u64 },

    #[error("seed must be a positive integer")]
    ZeroSeed,

    #[error("x = {x} is below the bound's stated range x >= {min}")]
    OutsideBoundRange { x: u64, min: u64 },

    #[error("{x} exceeds the segmented sieve budget of {budget}")]
    SegmentBudget { x: u128, budget: u64 },

    #[error("invalid arithmetic-progression query: need 1 <= a <= q, got q={q}, a={a}")]
    BadApQuery { q: u64, a: u64 },

    #[error("{m} is not an odd composite >= 9")]
    NotOddComposite { m: u64 },

    #[error("{m} is absent: no seed can make it appear")]
    AbsentNumber { m: u64 },

    #[error("corollary violation: {divisor} divides {multiple} but the verdicts disagree")]
    CorollaryViolation { divisor: u64, multiple: u64 },

    #[error("{0}")]
    Domain(String),

    #[error("{0}")]
    Resource(String),

    #[error("cannot parse factored value: {0}")]
    Parse(String),
}

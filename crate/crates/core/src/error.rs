use thiserror::Error;

/// Errors raised by the toolkit. Verification failures and unmet theorem
/// hypotheses are report outcomes, not errors.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("field GF({p}^{n}) has order {order}, above the ceiling {ceiling}")]
    FieldTooLarge {
        p: u64,
        n: u32,
        order: u128,
        ceiling: u64,
    },
    #[error("size guard: {what} = {size} exceeds ceiling {ceiling}")]
    CeilingExceeded {
        what: &'static str,
        size: u128,
        ceiling: u64,
    },
    #[error("division by zero in finite field")]
    ZeroInverse,
    #[error("discrete logarithm of zero is undefined")]
    ZeroLog,
    #[error("{m} divides neither side: {m} does not divide {n}")]
    NotDivisor { m: u64, n: u64 },
    #[error("element coordinate out of range: {0}")]
    OutOfRange(String),
    #[error("{m} is not a unit modulo {v}")]
    NotUnit { m: u64, v: u64 },
    #[error("gcd(v, k) = gcd({v}, {k}) != 1, normalized translate is not unique")]
    NotCoprime { v: u64, k: u64 },
    #[error("parameters violate the fundamental equation: {0}")]
    InfeasibleParams(String),
    #[error("parameter mismatch: {0}")]
    ParamsMismatch(String),
    #[error("no subgroup of order {0}")]
    NoSubgroup(u64),
    #[error("search budget exhausted: {0}")]
    BudgetExceeded(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

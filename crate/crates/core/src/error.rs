use thiserror::Error;

/// Errors raised anywhere in the factorization pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("divisor is not monic")]
    NonMonicDivisor,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is not separable (zero discriminant)")]
    ZeroDiscriminant,
    #[error("polynomial is not separable")]
    NotSeparable,
    #[error("{0} is not a prime")]
    BadPrime(u64),
    #[error("working precision exhausted ({0} digits)")]
    PrecisionExhausted(u32),
    #[error("modulus is reducible over its base field")]
    ReducibleModulus,
    #[error("division by zero in a residue field")]
    DivisionByZero,
    #[error("empty point set")]
    EmptyInput,
    #[error("value {0} is not attainable below the target degree")]
    Infeasible(i64),
    #[error("polynomial is not a representative of the type")]
    NotARepresentative,
    #[error("element is not a unit for the type valuation")]
    NotAUnit,
    #[error("residual factor appears squared modulo p")]
    SquareFactor,
    #[error("index formula produced a non-integer")]
    NonIntegralIndex,
    #[error("degree {0} is out of range for root valuation")]
    OutOfRange(usize),
    #[error("monomial exponent out of range")]
    ExponentOverflow,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by a value indistinguishable from zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("variable sets differ")]
    VariableMismatch,
    #[error("argument has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("linear coefficient is not a p-adic unit")]
    NonUnitLinearCoefficient,
    #[error("inexact division in structure polynomial recursion")]
    InexactDivision,
    #[error("Witt vectors of different lengths")]
    LengthMismatch,
    #[error("Witt vector too short for this operator")]
    LengthTooShort,
    #[error("curve has bad reduction at p")]
    BadReduction,
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("integrality violated: {0}")]
    IntegralityViolation(String),
    #[error("identity violated: {0}")]
    IdentityViolation(String),
    #[error("rank not stable under precision changes: {0}")]
    AmbiguousRank(String),
    #[error("rank mismatch: {0}")]
    RankMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

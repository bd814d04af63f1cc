use thiserror::Error;

/// Errors raised by the exact-arithmetic routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ring mismatch: {0}")]
    SpecMismatch(String),
    #[error("invalid ring spec: {0}")]
    InvalidSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("substituted series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("arity mismatch: expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("constant term is not a unit")]
    NonUnitConstantTerm,
    #[error("series is not reversible: {0}")]
    NotReversible(String),
    #[error("division by {0} is not possible in this ring")]
    NonInvertibleIndex(u64),
    #[error("jacobian at the origin is not invertible")]
    NonInvertibleJacobian,
    #[error("denominator of {0} is not invertible in the target ring")]
    DenominatorNotInvertible(String),
    #[error("ghost reconstruction needs an exact division by {0}")]
    NotTorsionFree(u64),
    #[error("truncation too short: {0}")]
    TruncationTooShort(String),
    #[error("universal polynomial is not integral: {0}")]
    IntegralityFailure(String),
    #[error("V-filtration bound {0} is too small (need at least 2)")]
    VBoundTooSmall(usize),
    #[error("operands live in different nilpotent algebras")]
    AlgebraMismatch,
    #[error("index {0} must be even")]
    OddIndex(u64),
    #[error("length {0} exceeds the universal-polynomial ceiling {1}")]
    CeilingExceeded(usize, usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

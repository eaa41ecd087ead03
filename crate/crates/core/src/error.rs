//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RealError {
    #[error("divisor enclosure contains 0 at {bits} bits")]
    DivisorStraddlesZero { bits: u32 },
    #[error("division by exact zero")]
    ZeroDivisor,
    #[error("invalid constant atom: {0}")]
    InvalidAtom(String),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("integer-part argument unresolved at n = {n} with {bits} bits")]
    PrecisionExhausted { n: i64, bits: u32 },
    #[error(transparent)]
    Real(#[from] RealError),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum IndexError {
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("unknown atom id {0}")]
    UnknownAtom(u32),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PpError {
    #[error("no piece matched the sample point")]
    NoPieceMatched,
    #[error("{0} pieces matched the sample point")]
    MultiplePiecesMatched(usize),
    #[error("piece condition sign ambiguous at the precision cap")]
    BoundaryAmbiguous,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("malformed canonical form: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RecurrenceError {
    #[error("expression value at n = {0} is not an integer")]
    NonIntegerValue(i64),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RewriteError {
    #[error("no guard branch matched the evaluated arguments")]
    GuardViolated,
    #[error("invalid identity parameters: {0}")]
    BadParameters(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field parameters: {0}")]
    BadFieldSpec(String),

    #[error("twist depth exceeded: {0}")]
    TwistDepthExceeded(String),

    #[error("value not twistable: {0}")]
    NonTwistable(String),

    #[error("division by zero within working precision: {0}")]
    DivisionByZeroWithinPrecision(String),

    #[error("ramification index not separable: p divides e = {0}")]
    InseparableRamification(u32),

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    #[error("convergence not certified: {0}")]
    ConvergenceNotCertified(String),

    #[error("two-route computations disagree beyond precision: {0}")]
    MismatchBeyondPrecision(String),

    #[error("intertwining relation failed: {0}")]
    IntertwineFailed(String),

    #[error("entry not rational: {0}")]
    NotRational(String),

    #[error("rank defect: {0}")]
    RankDefect(String),

    #[error("elimination row spaces differ: {0}")]
    EliminationMismatch(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }
}

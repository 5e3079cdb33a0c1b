use thiserror::Error;

use crate::poly::Polynomial;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("ambient variable counts differ ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("not divisible; remainder {remainder}")]
    NotDivisible { remainder: Polynomial },
    #[error("division by the zero linear form")]
    ZeroModulus,
    #[error("variable index {index} out of range 1..={n}")]
    VariableOutOfRange { index: usize, n: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameter n={n} for family {family}")]
    InvalidRank { family: String, n: usize },
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("edge {out:?} does not leave the source of {edge:?}")]
    NotOutgoing {
        edge: (usize, usize),
        out: (usize, usize),
    },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("classes live on different graphs")]
    GraphMismatch,
    #[error("subset {0:?} contains an antipodal pair")]
    IllegalSubset(Vec<usize>),
    #[error("{0}")]
    WrongFamily(String),
    #[error("expected {expected} coefficients, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("exact division failed at vertex {vertex}")]
    InternalDivisionFailure { vertex: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

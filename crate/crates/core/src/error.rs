use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown {dim}-simplex id {id}")]
    UnknownSimplex { dim: usize, id: usize },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("chain of dimension {0} is not a cycle")]
    NotACycle(usize),

    #[error("no holes: the first Betti number is zero")]
    NoHoles,

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

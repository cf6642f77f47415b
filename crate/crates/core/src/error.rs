use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("duplicate interpolation argument {0}")]
    DuplicateArgument(i64),

    #[error("counts inconsistent with claimed dimension/period: {0}")]
    InconsistentCounts(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("polytope is not a lattice polytope")]
    NotLattice,

    #[error("dilation factor must be positive, got {0}")]
    NonPositiveDilation(String),

    #[error("unsupported at desk scale: {0}")]
    Unsupported(String),

    #[error("generators are linearly dependent")]
    DependentGenerators,

    #[error("cone is not pointed")]
    NotPointed,

    #[error("evaluation point hits a pole at generator {0:?}")]
    Pole(Vec<i64>),

    #[error("{0:?} is not a face of the triangulation")]
    NotAFace(Vec<usize>),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

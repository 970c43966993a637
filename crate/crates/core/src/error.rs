use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("mode index {index} out of range 1..={modes}")]
    IndexOutOfRange { index: usize, modes: usize },
    #[error("particle number {n} exceeds max_n = {max_n}")]
    MaxNExceeded { n: usize, max_n: usize },
    #[error("guard exceeded: {what} needs {needed} entries (limit {limit})")]
    GuardExceeded {
        what: String,
        needed: u128,
        limit: u128,
    },
    #[error("Gram matrix is not symmetric at ({row}, {col})")]
    SymmetryViolation { row: usize, col: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix dimension {0} is not N! for N = {1}")]
    NotFactorial(usize, usize),
    #[error("indices must be pairwise distinct")]
    DuplicateIndices,
    #[error("partition has {parts} parts but only {modes} modes")]
    PartitionTooWide { parts: usize, modes: usize },
    #[error("no reference word of {needed} distinct modes among {modes}")]
    NoReferenceWord { needed: usize, modes: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("coefficient undefined: {0}")]
    UndefinedCoefficient(String),
    #[error("algebra is outside the affine family a_i a+_j = (1 + xN) d_ij + ...: {0}")]
    NotAffineFamily(String),
    #[error("no published transition-operator expansion for {0}")]
    NoPublishedExpansion(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("integer overflow while counting {0}")]
    Overflow(&'static str),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude vector has length {actual}, party layout {dims:?} requires {expected}")]
    LayoutMismatch {
        dims: Vec<usize>,
        expected: usize,
        actual: usize,
    },
    #[error("party dimensions must all be positive, got {0:?}")]
    InvalidDimensions(Vec<usize>),
    #[error("state is not normalized (norm squared {0})")]
    NotNormalized(f64),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("party index {party} out of range for {parties} parties")]
    NoSuchParty { party: usize, parties: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vectors are not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("density matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("density matrix trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("density matrix has negative eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("projection onto zero-probability outcome")]
    ZeroProbabilityProjection,
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("invalid transcript record: {0}")]
    InvalidRecord(String),
    #[error("optical model limit: {0}")]
    ModelLimit(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("form is not homogeneous")]
    NotHomogeneous,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ambient dimension {n} exceeds the matrix cap {cap}; raise --matrix-cap to materialize")]
    MatrixCap { n: usize, cap: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

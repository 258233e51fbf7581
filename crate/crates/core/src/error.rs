use thiserror::Error;

/// Errors raised by the double-form algebra, the curvature invariants and the
/// lattice geometry.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::MAX_DIM)]
    DimensionTooLarge(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("bidegree mismatch: ({0},{1}) vs ({2},{3})")]
    BidegreeMismatch(usize, usize, usize, usize),
    #[error("bidegree ({p},{q}) is not valid in dimension {n}")]
    InvalidBidegree { n: usize, p: usize, q: usize },
    #[error("invalid multi-index {axes:?} in dimension {n}: {reason}")]
    InvalidMultiIndex {
        axes: Vec<usize>,
        n: usize,
        reason: &'static str,
    },
    #[error("coefficient at ({0:?},{1:?}) is not finite")]
    NonFinite(Vec<usize>, Vec<usize>),
    #[error("degree constraint violated: {0}")]
    Degree(String),
    #[error("operation requires a symmetric (2,2) curvature tensor: {0}")]
    NotCurvature(String),
    #[error("vectors are not orthonormal (Gram defect {0:e})")]
    NotOrthonormal(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("metric is singular or not positive definite at point {0:?}")]
    NotPositiveDefinite(Vec<usize>),
    #[error("grid shape mismatch: {0:?} vs {1:?}")]
    ShapeMismatch(Vec<usize>, Vec<usize>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown format `{0}`")]
    UnknownFormat(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

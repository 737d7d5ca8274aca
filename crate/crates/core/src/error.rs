use thiserror::Error;

/// Errors produced by the diagram pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(
        "invalid persistence point ({birth}, {death}): death must be >= birth and birth finite"
    )]
    InvalidPoint { birth: f64, death: f64 },

    #[error("essential point (infinite death) where a finite point is required; apply an essential-class policy first")]
    EssentialPoint,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("unsupported homology dimension {0}: only 0 and 1 are computed")]
    UnsupportedDimension(usize),

    #[error("support set is empty but the point set is not")]
    EmptySupport,

    #[error("normalizer underflowed to zero; increase the smoothing bandwidth sigma")]
    Underflow,

    #[error("measures have mismatched supports ({left} vs {right} points)")]
    SupportMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quantile of the distance list is zero; increase sigma or use distinct diagrams")]
    ZeroQuantile,

    #[error("training data contains a single class; need at least two")]
    SingleClass,

    #[error("non-finite Gram entry at ({row}, {col})")]
    NonFiniteGram { row: usize, col: usize },

    #[error("Gram matrix is indefinite beyond tolerance (min eigenvalue {min_eigenvalue:.3e})")]
    IndefiniteGram { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

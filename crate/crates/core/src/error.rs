use thiserror::Error;

#[derive(Debug, Error)]
pub enum DfrError {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid interval ({a}, {b}): left end must be below right end")]
    InvalidInterval { a: f64, b: f64 },

    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),

    #[error("invalid tape: {0}")]
    InvalidTape(String),

    #[error("unsupported formulation: {0}")]
    UnsupportedFormulation(String),

    #[error("unsupported metric: {0}")]
    UnsupportedMetric(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("non-finite gradient")]
    NonFiniteGradient,

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("checkpoint format error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = DfrError> = std::result::Result<T, E>;

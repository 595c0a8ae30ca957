use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {0:?} lies outside the closed domain")]
    ExteriorPoint(Vec<f64>),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit exceeded: level would have {n} basis functions, cap is {cap}")]
    ResourceLimit { n: usize, cap: usize },

    #[error("ultrafunctions belong to different levels")]
    LevelMismatch,

    #[error("factorization failed at pivot {pivot}: matrix is not positive definite")]
    NotPositiveDefinite { pivot: usize },

    #[error("solve residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("operation `{op}` is not supported for the {family} family")]
    Unsupported {
        op: &'static str,
        family: &'static str,
    },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag used in CLI error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::ExteriorPoint(_) => "exterior_point",
            Error::InvalidDomain(_) => "invalid_domain",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::ResourceLimit { .. } => "resource_limit",
            Error::LevelMismatch => "level_mismatch",
            Error::NotPositiveDefinite { .. } => "not_positive_definite",
            Error::Residual { .. } => "residual",
            Error::Unsupported { .. } => "unsupported",
            Error::NonFinite(_) => "non_finite",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

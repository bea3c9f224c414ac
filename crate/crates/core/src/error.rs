use thiserror::Error;

/// Errors raised by the solvers, scans and simulations in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EdgeError {
    #[error("argument out of supported range: {0}")]
    Range(String),

    #[error("precision lost: {0}")]
    Precision(String),

    #[error("bracket resolution too coarse: {0}")]
    Resolution(String),

    #[error("grid too coarse: {message} (try num_points >= {suggested_points})")]
    Accuracy { message: String, suggested_points: usize },

    #[error("insufficient coverage: {0}")]
    Coverage(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty spectral window: {0}")]
    EmptyWindow(String),

    #[error("filter removed the state: retained norm {0:e}")]
    EmptyFilter(f64),

    #[error("unstable time stepping: {message} (try dt <= {suggested_dt})")]
    Stability { message: String, suggested_dt: f64 },

    #[error("rejected configuration: {0}")]
    Rejected(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for EdgeError {
    fn from(e: std::io::Error) -> Self {
        EdgeError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, EdgeError>;

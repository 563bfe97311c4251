use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two >= 8")]
    GridSize(usize),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("metric is not admissible: {0}")]
    MetricInvalid(String),
    #[error("band operators invalid: {0}")]
    BandInvalid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("flow integration failed: {0}")]
    FlowFailed(String),
    #[error("{0}")]
    NotConverged(String),
    #[error("cfl condition violated: dt*sqrt(max a)/h = {0:.3} > 1")]
    Cfl(f64),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

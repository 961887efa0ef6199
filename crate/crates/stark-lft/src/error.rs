use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
    #[error("domain truncation: {0}")]
    Truncation(String),
    #[error("unsupported domain: {0}")]
    Unsupported(String),
    #[error("overflow: value exceeds double range, ln|value| = {ln_abs}")]
    Overflow { ln_abs: f64 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config line {line}, field `{field}`: {msg}")]
    Config {
        line: usize,
        field: String,
        msg: String,
    },
    #[error(transparent)]
    Core(#[from] kquant_core::Error),
    #[error("fit: {0}")]
    Fit(String),
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
}

pub type LabResult<T> = std::result::Result<T, LabError>;

//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Rejected configuration value or inconsistent parameter combination.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// Random placement could not satisfy the distance constraints within
    /// the retry budget.
    #[error("drop generation failed: {0}")]
    DropGeneration(String),
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config file parse error: {0}")]
    ConfigParse(#[from] toml::de::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

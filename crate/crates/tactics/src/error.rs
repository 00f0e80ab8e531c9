use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] attrition_core::Error),
    #[error("invalid map: {0}")]
    Map(String),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("illegal action for group {group}: {message}")]
    IllegalAction { group: String, message: String },
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error("unsupported format version {found} (expected {expected})")]
    FormatVersion { found: u32, expected: u32 },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

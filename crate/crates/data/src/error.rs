use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] attrition_core::Error),
    /// A malformed trace event; `index` is the event's position in the trace.
    #[error("trace event {index} (frame {frame}): {message}")]
    Trace { index: usize, frame: u64, message: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported format_version {found} (expected {expected})")]
    FormatVersion { found: u32, expected: u32 },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

mod args;
mod commands;

use std::fmt::Display;
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use crate::args::{Cli, Format};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or unreadable inputs; nothing was computed.
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Runtime(_) => "runtime",
        }
    }
}

/// Marks a failure as a validation error (exit code 2).
pub trait OrInvalid<T> {
    fn or_invalid(self, context: impl Display) -> Result<T, CliError>;
}

impl<T, E: Display> OrInvalid<T> for Result<T, E> {
    fn or_invalid(self, context: impl Display) -> Result<T, CliError> {
        self.map_err(|e| CliError::Validation(format!("{context}: {e}")))
    }
}

impl From<attrition_core::Error> for CliError {
    fn from(e: attrition_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<attrition_data::Error> for CliError {
    fn from(e: attrition_data::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<attrition_tactics::Error> for CliError {
    fn from(e: attrition_tactics::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if format == Format::Json {
                eprintln!("{}", serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string(), "exit_code": e.code() } }));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.code())
        }
    }
}

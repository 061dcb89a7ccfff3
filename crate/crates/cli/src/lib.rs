//! Library side of the `bellfilter` command: file formats, reports and the
//! subcommands, kept separate from argument parsing so they can be driven
//! directly.

pub mod commands;
pub mod json;
pub mod report;

use bellfilter::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// JSON Schema covering every document the command writes.
pub const SCHEMA: &str = include_str!("../schema/bellfilter-v1.schema.json");

pub mod exit {
    pub const OK: i32 = 0;
    /// `verify` found a state that is not Bell diagonal.
    pub const NOT_BELL_DIAGONAL: i32 = 1;
    pub const SEPARABLE: i32 = 2;
    pub const LAMBDA_N_ZERO: i32 = 3;
    pub const INVALID: i32 = 4;
    pub const INTERNAL: i32 = 5;
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: exit::INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Separable(_) => exit::SEPARABLE,
            Error::LambdaNZero { .. } => exit::LAMBDA_N_ZERO,
            Error::ZeroVector
            | Error::NonFinite
            | Error::NotHermitian(_)
            | Error::NotSymmetric(_)
            | Error::NegativeEigenvalue(_)
            | Error::TraceDefect(_)
            | Error::InvalidCompletion(_)
            | Error::InvalidParams(_) => exit::INVALID,
            Error::DegenerateGeometry(_)
            | Error::NotProduct(_)
            | Error::VanishingProbability(_)
            | Error::Consistency(_) => exit::INTERNAL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// A document to write plus the exit code that goes with it.
#[derive(Debug)]
pub struct Outcome {
    pub document: serde_json::Value,
    pub code: i32,
}

impl Outcome {
    pub fn new<T: serde::Serialize>(doc: &T, code: i32) -> Result<Self, CliError> {
        let document = serde_json::to_value(doc).map_err(|e| CliError {
            code: exit::INTERNAL,
            message: e.to_string(),
        })?;
        Ok(Outcome { document, code })
    }
}

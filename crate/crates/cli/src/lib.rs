//! The `rescon` command-line tool as a library: scenario files, built-in
//! presets, artifact writers and the three subcommands.

use thiserror::Error;

pub mod commands;
pub mod presets;
pub mod report;
pub mod scenario;
pub mod states;

pub use scenario::Scenario;

/// Environment variable overriding the geometry tolerance.
pub const TOL_ENV: &str = "RESCON_TOL";

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// Input that parses but does not describe a runnable problem.
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
    /// A run broke an invariant the algorithm guarantees.
    #[error("{0}")]
    Runtime(String),
    #[error("{0}")]
    Capacity(String),
}

impl CliError {
    /// 1 is reserved for a failed verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Invalid(_) | CliError::Io(_) => 2,
            CliError::Runtime(_) => 3,
            CliError::Capacity(_) => 4,
        }
    }
}

/// The `RESCON_TOL` value when set, else the library default.
pub fn tolerance(env: Option<&str>) -> Result<f64, CliError> {
    match env {
        None => Ok(rescon_core::DEFAULT_TOL),
        Some(raw) => match raw.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(CliError::Usage(format!("{TOL_ENV}={raw:?} is not a positive number"))),
        },
    }
}

use std::fmt;

use rydberg_core::Error;

#[derive(Debug)]
pub enum CliError {
    /// Bad scenario, unreadable input or unwritable output. Exit code 2.
    Config(String),
    /// A numerical procedure failed. Exit code 3.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = match &e {
            Error::Config(m) => m.clone(),
            other => other.to_string(),
        };
        match e {
            Error::Config(_) | Error::Parse { .. } | Error::InvalidLevel { .. } | Error::Domain(_) => {
                CliError::Config(msg)
            }
            Error::Range(_) | Error::Numerical(_) | Error::Solver { .. } => CliError::Numeric(msg),
        }
    }
}

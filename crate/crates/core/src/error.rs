use std::fmt;

/// Errors raised by the physics and numerics layers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    Domain(String),
    /// An argument is inside the domain but the result would overflow.
    Range(String),
    /// Missing or inconsistent model configuration (atoms, channels, files).
    Config(String),
    /// The requested (n, l) does not describe a bound SQDT level.
    InvalidLevel { n: u32, l: u32, reason: String },
    /// A numerical procedure failed to reach its tolerance.
    Numerical(String),
    /// Root bracketing or refinement failed. `profile` samples the 1D
    /// residual as (parameter, residual) pairs.
    Solver {
        message: String,
        profile: Vec<(f64, f64)>,
    },
    /// Malformed line in a tabular data file.
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Range(m) => write!(f, "range error: {m}"),
            Error::Config(m) => write!(f, "configuration error: {m}"),
            Error::InvalidLevel { n, l, reason } => {
                write!(f, "invalid level n={n}, l={l}: {reason}")
            }
            Error::Numerical(m) => write!(f, "numerical failure: {m}"),
            Error::Solver { message, profile } => {
                write!(f, "solver failure: {message}")?;
                if !profile.is_empty() {
                    write!(f, " (residual profile:")?;
                    for (x, r) in profile {
                        write!(f, " {x:.6e}:{r:.3e}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            Error::Parse { line, message } => write!(f, "parse error on line {line}: {message}"),
        }
    }
}

impl std::error::Error for Error {}

use std::fmt;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Engine(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Engine(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            CliError::Config(m) => ("config error", m),
            CliError::Engine(m) => ("engine error", m),
            CliError::Io(m) => ("i/o error", m),
        };
        // Diagnostics are exactly one line.
        write!(f, "{kind}: {}", msg.replace(['\n', '\r'], " "))
    }
}

impl From<pbe_core::Error> for CliError {
    fn from(e: pbe_core::Error) -> Self {
        use pbe_core::Error::*;
        match e {
            InvalidSpec(_) | Parse(_) | Unsupported2D | DimensionMismatch { .. } => CliError::Config(e.to_string()),
            _ => CliError::Engine(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

use std::fmt;

/// Front-end failure, classified for the process exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad command line: unknown flag, malformed value, missing unit.
    Usage(String),
    /// Well-formed request that the model rejects.
    Validation(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Validation(_) => "validation",
            CliError::Io(_) => "io",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Io(m) => m,
        }
    }

    pub(crate) fn io(context: impl fmt::Display, err: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

/// `error[kind]: message` on one line.
impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flat: String = self
            .message()
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ");
        write!(f, "error[{}]: {}", self.kind(), flat)
    }
}

impl std::error::Error for CliError {}

impl From<erlab_core::Error> for CliError {
    fn from(e: erlab_core::Error) -> Self {
        match e {
            erlab_core::Error::Unit(u) => CliError::Usage(u.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

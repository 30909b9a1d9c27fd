use thiserror::Error;

/// Failure classes, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed flags or config (exit 2).
    #[error("usage: {0}")]
    Usage(String),
    /// A check ran and failed (exit 1).
    #[error("verification failed: {0}")]
    Failed(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<nilflow::Error> for CliError {
    fn from(e: nilflow::Error) -> Self {
        use nilflow::Error as E;
        match e {
            E::InvalidParameter(_) | E::Parse(_) | E::OutOfBox { .. } | E::OutsideInterval { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Failed(other.to_string()),
        }
    }
}

use std::io;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, specs, or dataset files.
    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    Budget(String),

    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Budget(_) => EXIT_BUDGET,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    /// An I/O failure while writing results.
    pub fn output(context: &str, e: io::Error) -> Self {
        CliError::Internal(format!("{context}: {e}"))
    }
}

impl From<listdec::Error> for CliError {
    fn from(e: listdec::Error) -> Self {
        use listdec::Error as E;
        match e {
            E::Param(_) | E::Format(_) | E::SampleSizeOverflow { .. } => CliError::Input(e.to_string()),
            E::Io(ref io) if io.kind() == io::ErrorKind::NotFound => CliError::Input(e.to_string()),
            E::BudgetExhausted { .. } => CliError::Budget(e.to_string()),
            E::NoConvergence { .. } | E::Invariant(_) | E::Io(_) => CliError::Internal(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

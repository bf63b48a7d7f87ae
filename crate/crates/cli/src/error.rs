use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Clap(#[from] clap::Error),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("config file: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] pairon_core::Error),

    /// A consistency check on the output failed before writing.
    #[error("{0}")]
    Check(String),
}

impl CliError {
    /// 0 success (help/version), 1 I/O, 2 usage, 3 numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Clap(e) => e.exit_code() as u8,
            CliError::Io(_) => 1,
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::Check(_) => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

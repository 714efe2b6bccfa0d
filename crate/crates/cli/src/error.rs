use std::path::PathBuf;

/// Failures of the command-line front end, each with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} expectation(s) not met")]
    Mismatch(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) | CliError::Io { .. } => 3,
            CliError::Mismatch(_) => 4,
        }
    }
}

impl From<fkdg_core::Error> for CliError {
    fn from(e: fkdg_core::Error) -> Self {
        match e {
            fkdg_core::Error::InvalidArgument(m) => CliError::Config(m),
            fkdg_core::Error::NumericFailure(m) => CliError::Numeric(m),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

use std::io;
use std::path::PathBuf;

/// Everything that can stop a command.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A flag or config key with an unusable value.
    #[error("--{flag}: {message}")]
    Flag { flag: String, message: String },
    #[error("{}:{line}: {message}", path.display())]
    Config { path: PathBuf, line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Csv { path: PathBuf, line: u64, message: String },
    #[error("{}: {message}", path.display())]
    File { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] lieflow_core::Error),
}

impl CliError {
    pub fn flag(flag: &str, message: impl Into<String>) -> Self {
        CliError::Flag { flag: flag.to_string(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Usage problems exit with 2, failures while running with 1.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Flag { .. } | CliError::Config { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

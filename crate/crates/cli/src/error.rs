use std::process::ExitCode;

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration file, flag or parameter value.
    #[error("configuration error: {0}")]
    Config(String),

    /// An integral, image sum or eigensolve failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A self-test or calibration check did not pass.
    #[error("check failed: {0}")]
    Check(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Check(_) => 4,
            CliError::Io { .. } => 1,
        })
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

impl From<btz_tripartite::Error> for CliError {
    fn from(e: btz_tripartite::Error) -> Self {
        use btz_tripartite::Error as E;
        match e {
            E::Domain(_) | E::InvalidInput(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

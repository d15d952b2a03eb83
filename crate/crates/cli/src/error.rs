use std::process::ExitCode;

use ati_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("resource cap: {0}")]
    Resource(String),
    #[error("{0}")]
    Failure(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Failure(_) | CliError::Io(_) => 1,
        })
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::ChannelExplosion { .. } => CliError::Resource(e.to_string()),
            CoreError::InvalidParameter(_) => CliError::Config(e.to_string()),
            CoreError::Range(_) => CliError::Resource(e.to_string()),
            CoreError::InChannel { ref source, .. } if matches!(**source, CoreError::Range(_)) => {
                CliError::Resource(e.to_string())
            }
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failure(format!("json: {e}"))
    }
}

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("sample {index}: {error}")]
    Sample { index: usize, error: wavebound::Error },

    #[error(transparent)]
    Numerics(#[from] wavebound::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot encode summary: {0}")]
    Encode(#[from] serde_json::Error),
}

impl CliError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        CliError::ConfigInvalid(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

/// Attach a sample index to a numerical error.
pub(crate) trait AtSample<T> {
    fn at_sample(self, index: usize) -> Result<T>;
}

impl<T> AtSample<T> for wavebound::Result<T> {
    fn at_sample(self, index: usize) -> Result<T> {
        self.map_err(|error| CliError::Sample { index, error })
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

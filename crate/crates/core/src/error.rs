use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A grid needs more analog configurations than there are pilots.
    #[error("grid needs {radial_samples} radial samples but only {pilots} pilots are available")]
    PilotBudget { radial_samples: usize, pilots: usize },

    /// A configuration value failed validation; `path` is the dotted key.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("failed to parse config {file}: {source}")]
    ConfigParse {
        file: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

//! Parallel campaign runner, file formats and experiment pipeline for
//! `stochsource-core`.

pub mod config;
pub mod formats;
pub mod pipeline;
pub mod runner;

use std::path::PathBuf;

pub use config::ExperimentConfig;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] stochsource_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("a worker thread panicked")]
    Worker,
}

impl Error {
    /// Stable machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Core(stochsource_core::Error::MissingChannels(_)) => "missing_channels",
            Error::Core(_) => "numerical",
            Error::Io { .. } => "io",
            Error::Config(_) => "config",
            Error::Format { .. } => "format",
            Error::Worker => "worker",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl std::fmt::Display) -> Self {
        Error::Format { path: path.into(), message: message.to_string() }
    }
}

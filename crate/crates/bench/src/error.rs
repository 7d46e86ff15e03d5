use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no images found in {}", .0.display())]
    EmptyDataset(PathBuf),
    #[error("no report rows to summarize")]
    EmptyRows,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("config file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] phaseret::Error),
}

impl BenchError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    /// Whether the failure stems from user input rather than a run.
    pub fn is_config(&self) -> bool {
        matches!(self, Self::Config(_) | Self::Toml(_) | Self::EmptyDataset(_))
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;

use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the simulator. `Config` variants map to CLI exit
/// code 2 (usage/configuration), everything else to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown scenario `{id}`; valid built-ins: {}", valid.join(", "))]
    UnknownScenario { id: String, valid: Vec<String> },

    #[error("{path}: {message}")]
    ScenarioSchema { path: String, message: String },

    #[error("unknown lamp model id {0}")]
    UnknownModel(usize),

    #[error("no models available for purchase at month {month}")]
    EmptyMarket { month: u32 },

    #[error("cannot select a peer from a population of one")]
    NoPeer,

    #[error("run {run_index} failed: {source}")]
    Run {
        run_index: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by bad user input rather than a runtime fault.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::UnknownScenario { .. } | Error::ScenarioSchema { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

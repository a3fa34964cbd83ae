use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a register of {len} qubits")]
    QubitOutOfRange { index: usize, len: usize },

    #[error("two-qubit operation requires distinct qubits, got {0} twice")]
    SameQubit(usize),

    #[error("a graph state needs at least one qubit")]
    EmptyRegister,

    #[error("regions overlap at site {0}")]
    OverlappingRegions(usize),

    #[error("dense conversion supports at most {max} qubits, state has {n}")]
    TooLarge { n: usize, max: usize },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("fit did not converge: {0}")]
    NoConvergence(String),

    #[error("window of {window} steps exceeds series of length {len}")]
    WindowTooLarge { window: usize, len: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("worker pool error: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The noise model cannot be turned into a simple detector graph.
    #[error("ill-formed noise model: {0}")]
    Model(String),

    #[error("detector {vertex} cannot reach any boundary vertex")]
    NoBoundaryPath { vertex: usize },

    #[error("detectors {a} and {b} are not connected through detector vertices")]
    Disconnected { a: usize, b: usize },

    #[error("distance table was built for a different detector graph")]
    GraphMismatch,

    #[error("vertex {0} is not a detector")]
    NotADetector(usize),

    #[error("not a perfect matching: {0}")]
    NotPerfect(String),

    #[error("instance with {vertices} vertices exceeds the enumeration limit of {limit}")]
    TooLarge { vertices: usize, limit: usize },

    #[error("graph has no perfect matching")]
    NoPerfectMatching,

    #[error("no verified matching after {attempts} attempts on a path graph with {vertices} vertices")]
    BudgetExhausted { attempts: u64, vertices: usize },

    #[error("window {window}: {source}")]
    Window {
        window: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}

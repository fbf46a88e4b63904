use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate interaction ({user}, {item}) reached matrix construction")]
    DuplicateInteraction { user: String, item: String },

    #[error("duplicate {kind} id {id:?}")]
    DuplicateId { kind: &'static str, id: String },

    #[error("{kind} id {id:?} missing from embedding file")]
    MissingId { kind: &'static str, id: String },

    #[error("sparsity is undefined for a matrix with {users} users and {items} items")]
    UndefinedSparsity { users: usize, items: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("column {0:?} not found in header")]
    MissingColumn(String),

    #[error("{path}: no parseable rows ({rejected} rejected)")]
    NoParseableRows { path: PathBuf, rejected: usize },

    #[error("no interactions left after preprocessing")]
    EmptyAfterPreprocessing,

    #[error("cannot compute an intermediary rating from an empty rating list")]
    NoRatings,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{learner} training diverged at epoch {epoch}")]
    TrainingDiverged { learner: &'static str, epoch: usize },

    #[error("every grid cell failed; first: {hyper}: {message}")]
    GridFailed { hyper: String, message: String },

    #[error("embedding file line {line}: {message}")]
    EmbeddingFormat { line: usize, message: String },

    #[error("both ensemble weights are zero")]
    ZeroWeights,

    #[error("embeddings and interactions disagree: {0}")]
    MapMismatch(String),

    #[error("no evaluable users (no user has a test item)")]
    NoEvaluableUsers,

    #[error("fold splitting needs at least 5 interactions, found {0}")]
    TooFewInteractions(usize),

    #[error("statistical test input: {0}")]
    StatsInput(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end: 1 usage, 2 data, 3 training.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::Toml(_) | Error::ZeroWeights => 1,
            Error::TrainingDiverged { .. } | Error::GridFailed { .. } => 3,
            _ => 2,
        }
    }
}

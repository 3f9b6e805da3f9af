use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] io::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no documents")]
    NoDocuments,

    #[error("corpus must have exactly two labels, found {}: [{}]", .found.len(), .found.join(", "))]
    Labels { found: Vec<String> },

    #[error("duplicate document id {0:?}")]
    DuplicateId(String),

    #[error("vocabulary is empty")]
    EmptyVocabulary,

    #[error("word {0:?} is not in the vocabulary")]
    UnknownWord(String),

    #[error("vocabulary hash mismatch: model has {model}, corpus has {corpus}")]
    VocabHashMismatch { model: String, corpus: String },

    #[error("malformed model file: {0}")]
    ModelFormat(String),

    #[error("training produced a non-finite value in epoch {epoch}")]
    NonFinite { epoch: usize },

    #[error("cannot compute a centroid over an empty word set")]
    EmptyClass,

    #[error("centroids coincide; the separating hyperplane is undefined")]
    DegenerateHyperplane,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("need at least {needed} words, got {found}")]
    TooFewWords { needed: usize, found: usize },

    #[error("cross-validation needs at least 2 documents per class, smallest class has {0}")]
    TooFewDocuments(usize),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("logistic regression diverged ({0}); try a smaller learning rate")]
    Divergence(String),

    #[error(
        "rankings cover different vocabularies: {only_x} words only in the first, {only_y} only in the second"
    )]
    VocabularyMismatch { only_x: usize, only_y: usize },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Invariant(String),
}

impl Error {
    /// True for errors caused by how the tool was invoked rather than by the data.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}

use thiserror::Error;

/// Crate-wide error type. Filter outcomes (missing id, missing date, no
/// references) are *not* errors; see [`crate::ingest::ParseRejection`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed XML: {0}")]
    MalformedXml(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("zero-length document")]
    ZeroLengthDocument,

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("training set contains a single class")]
    SingleClassTrainingSet,

    #[error("grid search needs at least {min} examples, got {got}")]
    TooFewExamples { min: usize, got: usize },

    #[error("evaluation inputs have mismatched lengths ({predictions} predictions vs {gold} gold labels)")]
    LengthMismatch { predictions: usize, gold: usize },

    #[error("article has no authors: {0}")]
    AuthorlessArticle(String),

    #[error("empty analysis table")]
    EmptyTable,

    #[error("design matrix is rank deficient; offending columns: {0:?}")]
    RankDeficient(Vec<String>),

    #[error("too few rows: {rows} rows for {cols} columns")]
    TooFewRows { rows: usize, cols: usize },

    #[error("mean citation count must be positive, got {0}")]
    NonPositiveMean(f64),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    BadInputFile { path: String, message: String },

    #[error("store error: {0}")]
    Store(String),

    #[error("model file: {0}")]
    ModelFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn bad_input(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::BadInputFile { path: path.into(), message: message.into() }
    }
}

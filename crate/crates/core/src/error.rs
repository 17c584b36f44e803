use std::path::PathBuf;

use crate::ids::{AffiliationId, ConferenceId, PaperId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("{path}:{line}: malformed record: {reason}")]
    Malformed {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("no seed papers for the requested conferences and years")]
    NoSeedPapers,

    #[error("unattributable paper {0}: no authorship links")]
    UnattributablePaper(PaperId),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("lag {lag} before {target_year} leaves the panel (first year {first_year})")]
    LagOutOfRange {
        target_year: i32,
        lag: usize,
        first_year: i32,
    },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite value in {what} at row {row}")]
    NonFinite { what: String, row: usize },

    #[error("missing feature column `{0}`")]
    MissingColumn(String),

    #[error("design matrix is rank deficient; collinear columns: {}", .0.join(", "))]
    RankDeficient(Vec<String>),

    #[error("mixed model did not converge after {iterations} iterations (last changes: {trace:?})")]
    NonConvergence { iterations: usize, trace: Vec<f64> },

    #[error("unknown conference {0}")]
    UnknownConference(ConferenceId),

    #[error("affiliation {0} appears twice in the ranked list")]
    DuplicateAffiliation(AffiliationId),

    #[error("negative relevance {0}")]
    NegativeRelevance(f64),

    #[error("insufficient history: {0}")]
    InsufficientHistory(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("machine index {index} out of range for {class} (class size {size})")]
    IndexOutOfRange {
        class: &'static str,
        index: u64,
        size: u64,
    },

    #[error("class size for {class} with {n_states} states exceeds u64")]
    ClassSizeOverflow { class: &'static str, n_states: u16 },

    #[error("n_states must be at least 1")]
    InvalidStateCount,

    #[error("tuple length k={k} outside supported range 1..={max}")]
    InvalidK { k: u8, max: u8 },

    #[error("distributions have mismatched tuple lengths: {left} vs {right}")]
    MismatchedK { left: u8, right: u8 },

    #[error("distribution is empty")]
    EmptyDistribution,

    #[error("sample size {requested} exceeds class size {available}")]
    SampleTooLarge { requested: u64, available: u64 },

    #[error("rank vector has zero variance; correlation undefined")]
    UndefinedCorrelation,

    #[error("need at least {needed} values, got {got}")]
    TooFewValues { needed: usize, got: usize },

    #[error("paired vectors have different lengths: {left} vs {right}")]
    MismatchedLengths { left: usize, right: usize },

    #[error("non-finite value in paired ranking")]
    NonFiniteValue,

    #[error("file {path} is {size} bytes, over the {max} byte cap")]
    OversizeFile { path: PathBuf, size: u64, max: u64 },

    #[error("image {path} spans {linear} linear pixels (width+height), over the {max} cap")]
    OversizeImage {
        path: PathBuf,
        linear: usize,
        max: usize,
    },

    #[error("no sequence records found in {path}")]
    NoFastaRecords { path: PathBuf },

    #[error("malformed image data: {0}")]
    MalformedImage(String),

    #[error("malformed distribution file: {0}")]
    MalformedDistribution(String),

    #[error("codebook tuple length k={k} over the {max} cap")]
    CodebookKTooLarge { k: u8, max: u8 },

    #[error("payload does not match codebook (digest mismatch)")]
    CodebookMismatch,

    #[error("corrupt payload: {0}")]
    CorruptPayload(String),

    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
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

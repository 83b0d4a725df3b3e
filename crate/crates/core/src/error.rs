use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed structured text in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("bad magic: expected \"XEB1\", found {found:?}")]
    BadMagic { found: [u8; 4] },

    #[error("version mismatch: expected {expected}, found {found}")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("unsupported dtype code {0}")]
    UnsupportedDtype(u8),

    #[error("truncated header: {found} bytes, need {needed}")]
    TruncatedHeader { found: usize, needed: usize },

    #[error("truncated payload: size mismatch (expected {expected} bytes, found {found})")]
    TruncatedPayload { expected: u64, found: u64 },

    #[error("size mismatch: payload has {found} bytes, header implies {expected}")]
    SizeMismatch { expected: u64, found: u64 },

    #[error("manifest mismatch: {0}")]
    ManifestMismatch(String),

    #[error("empty embedding set")]
    EmptyEmbeddingSet,

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("missing id {0:?}")]
    MissingId(String),

    #[error("missing language column {0:?}")]
    MissingColumn(&'static str),

    #[error("invalid length {length} for id {id:?} (must be >= 1)")]
    InvalidLength { id: String, length: i64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("pool too small: {available} eligible candidates, {requested} negatives requested")]
    PoolTooSmall { available: usize, requested: usize },

    #[error("zero-norm vector for id {0:?}")]
    ZeroNorm(String),

    #[error("layer-set mismatch: {0}")]
    LayerMismatch(String),

    #[error("degenerate representations: {0}")]
    DegenerateRepresentations(&'static str),

    #[error("degenerate subspace: {0}")]
    DegenerateSubspace(String),

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("optimizer diverged at step {step}: loss increased after {halvings} lr halvings")]
    Divergence { step: usize, halvings: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

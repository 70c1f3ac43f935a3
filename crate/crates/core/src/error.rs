use thiserror::Error;

use crate::word::Word;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {position}: expected {}, found {found}", expected.join(" | "))]
    Syntax {
        position: usize,
        expected: Vec<String>,
        found: String,
    },

    #[error("semantic error at position {position}: {message}")]
    Semantic { position: usize, message: String },

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("cannot flip the last bit of the empty word")]
    FlipEmpty,

    #[error("depth {requested} exceeds the configured {kind} limit {limit}")]
    DepthLimit {
        kind: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("word {} is not an extendible node", .0.to_dsl())]
    NotExtendible(Word),

    #[error("{0}")]
    Precondition(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("bit source exhausted after {consumed} bits")]
    SourceExhausted { consumed: u64 },

    #[error("subclass violation: node {} of the subclass is not in the ambient tree", .0.to_dsl())]
    NotSubclass(Word),

    #[error("no certificate: {0}")]
    NoCertificate(String),

    #[error("hypothesis not established: {0}")]
    HypothesisNotEstablished(String),

    #[error("cache mismatch for {hash} at depth {depth}: cached {cached}, recomputed {fresh}")]
    CacheMismatch {
        hash: String,
        depth: u64,
        cached: String,
        fresh: String,
    },

    #[error("malformed cache line {line}: {text:?}")]
    CacheFormat { line: usize, text: String },

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

//! Error type shared by all engine modules.

use thiserror::Error;

/// Errors produced by the flow engine.
#[derive(Debug, Error)]
pub enum FlowError {
    #[error("{context}: dimension mismatch (expected {expected}, got {actual})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("{context}: non-finite value at index {index}")]
    NonFinite { context: &'static str, index: usize },

    #[error("integration produced a non-finite state at step {step} (time {time})")]
    NonFiniteState { step: usize, time: f64 },

    #[error("time {time} outside [0, 1]")]
    TimeOutOfRange { time: f64 },

    #[error("{context}: expected a {expected} grid, got {actual}")]
    GridMismatch {
        context: &'static str,
        expected: &'static str,
        actual: String,
    },

    #[error("time grid needs at least one step")]
    EmptyGrid,

    #[error("time grid times must be strictly monotone within [0, 1]")]
    InvalidGrid,

    #[error("empty batch")]
    EmptyBatch,

    #[error("coupling oracle evaluated before its shared noise was set")]
    CouplingNoiseUnset,

    #[error("no target registered for condition id {0}")]
    UnknownCondition(u32),

    #[error("unknown glyph id (content {content}, style {style})")]
    UnknownGlyph { content: usize, style: usize },

    #[error("attention injection requires an attention field (got {field})")]
    InjectionUnsupported { field: String },

    #[error("tokenizer mismatch: {context}")]
    TokenizerMismatch { context: &'static str },

    #[error("training diverged at step {step}: loss is not finite")]
    Diverged { step: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("checkpoint format version {found} unsupported (expected {expected})")]
    CheckpointVersion { found: u32, expected: u32 },

    #[error("checkpoint does not describe a {expected} field (found {found})")]
    CheckpointKind { expected: &'static str, found: String },

    #[error("malformed image file: {0}")]
    MalformedImage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FlowError>;

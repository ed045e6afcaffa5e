//! Error type shared across the engine.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpxError {
    #[error("invalid fixed-point format: total_bits={total}, integer_bits={integer} (need 2 <= total <= 32, 1 <= integer <= total)")]
    InvalidFormat { total: u32, integer: u32 },

    #[error("tensor index out of bounds: ({i}, {j}, {c}) for shape {h}x{w}x{channels}")]
    IndexOutOfBounds {
        i: usize,
        j: usize,
        c: usize,
        h: usize,
        w: usize,
        channels: usize,
    },

    #[error("channel mismatch: input has {input} channels, layer expects {expected}")]
    ChannelMismatch { input: usize, expected: usize },

    #[error("shape mismatch at layer {layer}: {detail}")]
    ShapeMismatch { layer: usize, detail: String },

    #[error("empty scan array")]
    EmptyScan,

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("transform step {step} failed: {detail}")]
    TransformStep { step: usize, detail: String },

    #[error("model manifest error: {0}")]
    Manifest(String),

    #[error("unknown preset: {0}")]
    UnknownPreset(String),

    #[error("calibration needs at least 2 samples with distinct n_max values")]
    CalibrationRankDeficient,

    #[error("bad magic: expected \"SPXT\", found {0:?}")]
    BadMagic([u8; 4]),

    #[error("unsupported file version {0}")]
    BadVersion(u32),

    #[error("truncated payload: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },

    #[error("non-finite value at element {0}")]
    NonFinite(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SpxError>;

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while reading or writing PGM files.
#[derive(Debug, Error)]
pub enum PgmError {
    #[error("cannot open {path}: {source}")]
    Missing {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0} (only 8-bit samples up to 255 are supported)")]
    MaxvalTooLarge(u32),
    #[error("truncated pixel data: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("invalid sample: {0}")]
    InvalidSample(String),
}

/// Errors for everything that is not file I/O: shape mismatches, bad
/// parameters and preconditions of the numeric kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cannot decompose {width}x{height} image into {levels} levels")]
    TooManyLevels {
        width: usize,
        height: usize,
        levels: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("image too small: {0}")]
    ImageTooSmall(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

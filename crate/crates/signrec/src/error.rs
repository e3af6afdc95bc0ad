//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// What went wrong while parsing a PPM/PGM file. Offsets are byte positions
/// into the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetpbmErrorKind {
    /// File does not start with `P6` or `P5`.
    BadMagic,
    /// Header token missing or not a valid decimal number.
    MalformedHeader(String),
    /// Only `maxval = 255` images are supported.
    UnsupportedMaxval(u64),
    /// Pixel payload shorter than `width * height * channels`.
    TruncatedPayload { expected: u64, actual: u64 },
}

/// What went wrong while parsing a SIGNDB file. Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub enum DbErrorKind {
    /// Header missing, or format version not supported.
    Version(String),
    /// Header template count does not match the number of template blocks.
    CountMismatch { expected: u64, found: u64 },
    /// A token that should be a real number failed to parse.
    MalformedReal(String),
    /// Any other structural problem (wrong tag, wrong field count, ...).
    Structure(String),
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid frame: {reason}")]
    BadFrame { reason: String },

    #[error("dimension mismatch: expected {expected_w}x{expected_h}, got {actual_w}x{actual_h}")]
    DimensionMismatch {
        expected_w: u32,
        expected_h: u32,
        actual_w: u32,
        actual_h: u32,
    },

    #[error("frame must be square, got {width}x{height}")]
    NotSquare { width: u32, height: u32 },

    #[error("histograms are not comparable: {reason}")]
    HistogramMismatch { reason: String },

    #[error("matrix is not symmetric (max off-diagonal asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("eigen solver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("matrix order {order} is smaller than the {required} feature pairs to keep")]
    InsufficientOrder { order: usize, required: usize },

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("template database is empty")]
    EmptyDb,

    #[error("invalid template label {label:?}: {reason}")]
    InvalidLabel { label: String, reason: String },

    #[error("{path}: netpbm parse error at byte {offset}: {kind:?}")]
    Netpbm {
        path: PathBuf,
        offset: usize,
        kind: NetpbmErrorKind,
    },

    #[error("db parse error at line {line}: {kind:?}")]
    Db { line: usize, kind: DbErrorKind },

    #[error("config error at line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("invalid configuration: {reason}")]
    ConfigInvalid { reason: String },

    #[error("no frames found in {dir}")]
    NoFrames { dir: PathBuf },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: 1 I/O and usage problems, 2 parse and
    /// format problems, 3 pipeline (numeric) failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::NoFrames { .. } => 1,
            Error::Netpbm { .. }
            | Error::Db { .. }
            | Error::Config { .. }
            | Error::ConfigInvalid { .. } => 2,
            _ => 3,
        }
    }
}

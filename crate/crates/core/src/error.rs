use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,

    #[error("cannot parse system `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("prime {p} out of range: {reason}")]
    PrimeOutOfRange { p: u64, reason: &'static str },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("matrix data has {got} entries, expected {rows}x{cols}")]
    MatrixShape { rows: usize, cols: usize, got: usize },

    #[error("entry {value} is not reduced modulo {p}")]
    UnreducedEntry { value: u64, p: u32 },

    #[error("prime {p} does not exceed degree {degree}")]
    PrimeTooSmallForDegree { p: u32, degree: u32 },

    #[error("expected {expected} points, got {got}")]
    PointCount { expected: usize, got: usize },

    #[error("all coordinates of a projective point are zero")]
    ZeroPoint,

    #[error("could not sample distinct points after {retries} retries; the prime is too small")]
    SamplingExhausted { retries: u32 },

    #[error(
        "interpolation matrix {rows}x{cols} needs about {bytes} bytes, above the {limit} byte guard"
    )]
    MatrixTooLarge {
        rows: usize,
        cols: usize,
        bytes: u64,
        limit: u64,
    },

    #[error("invalid fundamental assignment: {0}")]
    Fundamental(String),

    #[error("rational oracle supports at most {limit} monomials, got {got}")]
    OracleTooLarge { got: u64, limit: u64 },

    #[error("degree {degree} outside supported range {lo}..={hi}")]
    DegreeOutOfRange { degree: u32, lo: u32, hi: u32 },

    #[error("invalid glue rule: {0}")]
    InvalidGlueRule(String),

    #[error("at least one attempt is required")]
    NoAttempts,

    #[error("invalid campaign configuration: {0}")]
    Config(String),

    #[error("log {path} already exists; pass resume to continue it")]
    LogExists { path: PathBuf },

    #[error("log header does not match this configuration (log {found}, config {expected})")]
    HeaderMismatch { found: String, expected: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

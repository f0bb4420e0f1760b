//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

/// A named theorem hypothesis that failed to hold.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HypothesisError {
    #[error("gamma ratio condition violated: gamma1/gamma2 = {ratio} must be < h/(h-1) = {limit}")]
    GammaRatio { ratio: f64, limit: f64 },
    #[error("stepsize {alpha} exceeds its cap {cap} ({which})")]
    StepsizeCap {
        alpha: f64,
        cap: f64,
        which: &'static str,
    },
    #[error("harmonic numerator a = {a} must lie in the open interval ({lower}, {upper})")]
    HarmonicInterval { a: f64, lower: f64, upper: f64 },
    #[error("theorem requires constant `{0}` which was not supplied")]
    MissingConstant(&'static str),
    #[error("theorem requires {expected} but was given {found}")]
    WrongRegime {
        expected: &'static str,
        found: &'static str,
    },
    #[error("constant `{name}` = {value} outside its admissible range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
}

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied arguments that violate an operation's contract.
    #[error("usage error: {0}")]
    Usage(String),
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Non-finite or otherwise unusable numeric data.
    #[error("data error: {0}")]
    Data(String),
    /// Malformed LIBSVM input.
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("hypothesis error: {0}")]
    Hypothesis(#[from] HypothesisError),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

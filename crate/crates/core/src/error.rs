use std::path::PathBuf;

use serde::Serialize;

/// Why a metric has no value for a given text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Undefined {
    /// The text has no tokens.
    EmptyText,
    /// Yule's K needs at least two tokens.
    TooFewTokens,
    /// Every type occurs exactly once, so K = 0 and Yule's I has no finite value.
    NoRepeatedTypes,
    /// MTLD never completed a factor and the remainder has TTR = 1.
    ZeroFactors,
}

impl Undefined {
    pub fn as_str(self) -> &'static str {
        match self {
            Undefined::EmptyText => "empty_text",
            Undefined::TooFewTokens => "too_few_tokens",
            Undefined::NoRepeatedTypes => "no_repeated_types",
            Undefined::ZeroFactors => "zero_factors",
        }
    }
}

impl std::fmt::Display for Undefined {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: invalid UTF-8 byte sequence")]
    Decode { path: PathBuf, line: usize },

    #[error("corpus '{0}' contains no tokens")]
    EmptyCorpus(String),

    #[error("metric is undefined for this text: {0}")]
    Undefined(Undefined),

    #[error(
        "requested {requested} sentence pairs but only {available} non-empty pairs are available"
    )]
    SplitSize { requested: usize, available: usize },

    #[error("parallel corpus sides differ in length: {source_lines} source lines vs {target_lines} target lines")]
    Misaligned {
        source_lines: usize,
        target_lines: usize,
    },

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error(
        "{degenerate} of {iterations} bootstrap resamples had an undefined metric (limit is 10%)"
    )]
    DegenerateBootstrap {
        degenerate: usize,
        iterations: usize,
    },

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid variant set '{source_word}': {reason}")]
    VariantSet { source_word: String, reason: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

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

    /// Errors caused by bad input data or arguments, as opposed to I/O trouble.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Csv(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

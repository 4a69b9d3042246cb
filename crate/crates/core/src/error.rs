use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("box has non-finite coordinate: {0:?}")]
    NonFinite([f64; 4]),
    #[error("box has non-positive area: {0:?}")]
    Degenerate([f64; 4]),
    #[error("{name} must be positive, got {value}")]
    Domain { name: &'static str, value: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchError {
    #[error("cannot build an adjacency matrix with no detections and no labels")]
    EmptyProblem,
    #[error("IoU threshold must lie in (0, 1], got {0}")]
    InvalidTau(f64),
    #[error("problem dimension {n} exceeds the supported maximum {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("brute-force matching is limited to {limit} boxes per side, got {n}")]
    BruteForceLimit { n: usize, limit: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("confidence {value} outside [0, 1] (frame {frame}, detection {detection})")]
    ConfidenceOutOfRange {
        frame: usize,
        detection: usize,
        value: f64,
    },
    #[error("curve is empty")]
    EmptyCurve,
    #[error("curve recall decreases at point {index}")]
    UnsortedCurve { index: usize },
    #[error("Brier score over {0} support is undefined: the support is empty")]
    EmptySupport(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterError {
    #[error("{side} record has no attribute `{attribute}`")]
    MissingAttribute { side: &'static str, attribute: String },
    #[error("filter syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("matching references {kind} index {index} but only {len} records were given")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        len: usize,
    },
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}line {line}, column {column}: {message}", file_prefix(.file))]
    Parse {
        file: Option<PathBuf>,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("report serialization failed: {0}")]
    Serialize(String),
}

fn file_prefix(file: &Option<PathBuf>) -> String {
    match file {
        Some(p) => format!("{}: ", p.display()),
        None => String::new(),
    }
}

impl IngestError {
    pub(crate) fn with_file(self, path: &std::path::Path) -> Self {
        match self {
            IngestError::Parse {
                line,
                column,
                message,
                ..
            } => IngestError::Parse {
                file: Some(path.to_path_buf()),
                line,
                column,
                message,
            },
            other => other,
        }
    }
}

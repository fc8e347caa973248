use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("normalization error: squared norm is {norm_sqr}, expected 1")]
    Normalization { norm_sqr: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("rank error: {0}")]
    Rank(String),

    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    #[error("R-squared undefined: target has zero variance")]
    UndefinedR2,

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("underdetermined: {rows} rows for {cols} columns")]
    Underdetermined { rows: usize, cols: usize },

    #[error("schema error: missing column `{0}`")]
    Schema(String),

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("type error: {0}")]
    Type(String),

    #[error("missing upstream artifact {}", .0.display())]
    MissingArtifact(PathBuf),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error in {}: {source}", .path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv error: {0}")]
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

pub type Result<T, E = Error> = std::result::Result<T, E>;

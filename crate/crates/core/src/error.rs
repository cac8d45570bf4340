use std::path::PathBuf;

use thiserror::Error;

use crate::model::Side;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing column `{0}` in manifest header")]
    MissingColumn(String),

    #[error("line {line}: invalid value `{value}` for `{field}`")]
    BadEnum {
        line: usize,
        field: &'static str,
        value: String,
    },

    #[error("line {line}: `{field}` out of range: {detail}")]
    Range {
        line: usize,
        field: &'static str,
        detail: String,
    },

    #[error("duplicate case_id `{0}`")]
    DuplicateId(String),

    #[error("{path}: bad magic, expected binary PGM (P5)")]
    BadMagic { path: PathBuf },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite temperature at pixel ({x}, {y})")]
    NonFiniteTemperature { x: usize, y: usize },

    #[error("temperature {value} °C at pixel ({x}, {y}) outside [15, 45] °C")]
    OutOfPhysioRange { x: usize, y: usize, value: f64 },

    #[error("invalid phantom spec: {0}")]
    InvalidSpec(String),

    #[error("cannot place {what} without overlap after {retries} attempts")]
    SpecOverflow { what: &'static str, retries: usize },

    #[error("no foreground above the ambient cutoff{}", side_suffix(*.side))]
    NoForeground { side: Option<Side> },

    #[error("{side:?} landmark ({x}, {y}) lies outside the breast mask")]
    LandmarkOutsideMask { side: Side, x: usize, y: usize },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("labels contain a single class; need both positives and negatives")]
    DegenerateLabels,

    #[error("non-finite feature at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },

    #[error("missing required modality for case(s): {}", .case_ids.join(", "))]
    MissingRequiredModality { case_ids: Vec<String> },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty cohort")]
    EmptyCohort,

    #[error("sample size must be positive")]
    NZero,

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn side_suffix(side: Option<Side>) -> String {
    match side {
        Some(s) => format!(" on the {s:?} side"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

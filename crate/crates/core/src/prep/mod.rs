//! Dataset preprocessing: structure elicitation, normalization/encoding,
//! train/test split, outliers, augmentation and imputation.

mod elicit;
mod impute;
mod outliers;
mod prepared;
mod quality;
mod schema;
mod smote;
mod split;
mod workflow;

use std::path::{Path, PathBuf};

pub use elicit::{elicit_schema, NORMALIZATION_MENU, TYPE_MENU};
pub use impute::impute_knn;
pub use outliers::{detect_outliers_iqr, iqr_fences, quantile_sorted};
pub use prepared::{apply_schema, is_missing_token, parse_raw_csv, read_raw_csv, MinMax, PreparedDataset, Target};
pub use quality::{feature_errors, weighted_error, xgewfi_score};
pub use schema::{DatasetSchema, FieldType, Normalization};
pub use smote::{augment_smote, balance_allocation, smote_with_allocation, SyntheticRow};
pub use split::{split, split_indices, SplitDataset, DEFAULT_SEED, DEFAULT_TRAIN_RATIO};
pub use workflow::{open_dataset, preprocess, quality_pass, raw_path, Provenance, QualityReport};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PrepError {
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("csv: {0}")]
    Csv(String),
    #[error("invalid dataset structure: {0}")]
    InvalidSchema(String),
    #[error("row {row} has {actual} columns, expected {expected}")]
    ColumnCount { row: usize, expected: usize, actual: usize },
    #[error("non-numeric value {value:?} at row {row}, column {column}")]
    NonNumeric { row: usize, column: usize, value: String },
    #[error("missing class label at row {row}")]
    MissingLabel { row: usize },
    #[error("degenerate normalization range in column {column}")]
    DegenerateRange { column: String },
    #[error("expected {expected} values, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("train ratio must lie strictly between 0 and 1, got {0}")]
    InvalidRatio(f64),
    #[error("need at least {needed} rows, got {actual}")]
    TooFewRows { needed: usize, actual: usize },
    #[error("insufficient data for quartiles")]
    InsufficientQuartileData,
    #[error("class `{class}` has {count} member(s); SMOTE with k={k} needs more than k")]
    SmoteClassTooSmall { class: String, count: usize, k: usize },
    #[error("neighbour count must be at least 1, got {0}")]
    InvalidK(usize),
    #[error("column {0} has no observed value")]
    AllMissingColumn(usize),
    #[error("row {0} has no observed value")]
    AllMissingRow(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("feature importances must be non-negative and sum to 1 (sum = {0})")]
    Importance(f64),
    #[error("the dialogue ended before the dataset was described")]
    DialogueClosed,
}

impl PrepError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        PrepError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

//! Algorithms: k-means with silhouette, PCA, MLP classifier/regressor with
//! learning curves, and random-forest importance.

mod curves;
mod forest;
mod kmeans;
pub mod mlp;
mod pca;
mod silhouette;
mod supervised;

pub use curves::{learning_curves, CurveSet, MeanStd, DEFAULT_FOLDS, DEFAULT_SIZES};
pub use forest::{random_forest, rf_importance, Forest, ImportanceResult, Node, Task, DEFAULT_FOREST_SEED, DEFAULT_TREES};
pub use kmeans::{kmeans, ClusteringResult, Init, MAX_ITERATIONS};
pub use pca::{pca, PcaResult};
pub use silhouette::silhouette;
pub(crate) use supervised::train_with_seed;
pub use supervised::{
    evaluate, fit_network, predict, r2_score, train_supervised, FitReport, ModelKind, Prediction, SeedPolicy, SupervisedModel,
    TrainConfig, REPRODUCIBLE_SEED,
};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EngineError {
    #[error("k must satisfy 1 <= k <= rows, got k={k} with {rows} rows")]
    InvalidK { k: usize, rows: usize },
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("rows have different lengths")]
    RaggedMatrix,
    #[error("matrix contains NaN or infinite values")]
    NonFinite,
    #[error("silhouette undefined")]
    SilhouetteUndefined,
    #[error("n_components must lie in 1..={max}, got {requested}")]
    InvalidComponents { requested: usize, max: usize },
    #[error("expected {expected} values, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("classification needs at least 2 classes")]
    SingleClass,
    #[error("{0}")]
    TargetMismatch(&'static str),
    #[error("k_folds must be at least 2, got {0}")]
    InvalidFolds(usize),
    #[error("training sizes must be fractions in (0, 1]")]
    InvalidSizes,
    #[error("need at least {needed} rows, got {actual}")]
    TooFewRows { needed: usize, actual: usize },
    #[error("dataset has no class or regression field")]
    MissingTarget,
    #[error("need at least 2 features, got {0}")]
    TooFewFeatures(usize),
    #[error("forest needs at least one tree")]
    InvalidTrees,
}

/// Column count of a non-empty, rectangular, finite matrix.
pub(crate) fn check_matrix(x: &[Vec<f64>]) -> Result<usize, EngineError> {
    let d = x.first().ok_or(EngineError::EmptyMatrix)?.len();
    if d == 0 {
        return Err(EngineError::EmptyMatrix);
    }
    if x.iter().any(|r| r.len() != d) {
        return Err(EngineError::RaggedMatrix);
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(EngineError::NonFinite);
    }
    Ok(d)
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

//! MLP classifier/regressor over a [`PreparedDataset`].

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mlp::{Adam, Network, Output};
use super::{check_matrix, EngineError};
use crate::prep::{MinMax, PreparedDataset, Target};

/// Seed used for reproducible requests.
pub const REPRODUCIBLE_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SeedPolicy {
    #[default]
    #[serde(rename = "REPRODUCTIBLE")]
    Reproducible,
    #[serde(rename = "RANDOM")]
    Random,
}

impl SeedPolicy {
    /// Parses the RANDOM key value.
    pub fn from_key_value(v: &str) -> Option<SeedPolicy> {
        match v.trim().to_ascii_uppercase().as_str() {
            "REPRODUCTIBLE" | "REPRODUCIBLE" => Some(SeedPolicy::Reproducible),
            "RANDOM" => Some(SeedPolicy::Random),
            _ => None,
        }
    }

    pub fn seed(self) -> u64 {
        match self {
            SeedPolicy::Reproducible => REPRODUCIBLE_SEED,
            SeedPolicy::Random => rand::random(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Classifier,
    Regressor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub alpha: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without improvement before stopping.
    pub patience: usize,
    pub tol: f64,
    pub validation_fraction: f64,
    /// Below this many rows the training loss is monitored instead of a holdout.
    pub min_rows_for_validation: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden: vec![32, 32],
            learning_rate: 1e-3,
            alpha: 1e-4,
            batch_size: 32,
            max_epochs: 500,
            patience: 10,
            tol: 1e-4,
            validation_fraction: 0.1,
            min_rows_for_validation: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub epochs: usize,
    /// Monitored loss per epoch (validation when a holdout was used).
    pub loss_curve: Vec<f64>,
    pub used_validation: bool,
}

/// Trains a fresh network on `(x, y)`. All randomness comes from `seed`.
pub fn fit_network(
    x: &[Vec<f64>],
    y: &[Vec<f64>],
    output: Output,
    config: &TrainConfig,
    seed: u64,
) -> (Network, FitReport) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sizes = vec![x[0].len()];
    sizes.extend(&config.hidden);
    sizes.push(y[0].len());
    let mut net = Network::new(&sizes, output, config.alpha, &mut rng);

    let mut order: Vec<usize> = (0..x.len()).collect();
    let used_validation = x.len() >= config.min_rows_for_validation && config.validation_fraction > 0.0;
    let (train_idx, val_idx) = if used_validation {
        order.shuffle(&mut rng);
        let n_val = ((x.len() as f64 * config.validation_fraction).ceil() as usize).clamp(1, x.len() - 1);
        (order[n_val..].to_vec(), order[..n_val].to_vec())
    } else {
        (order, Vec::new())
    };
    let pick = |idx: &[usize], m: &[Vec<f64>]| idx.iter().map(|&i| m[i].clone()).collect::<Vec<_>>();
    let (vx, vy) = (pick(&val_idx, x), pick(&val_idx, y));

    let mut params = net.params();
    let mut adam = Adam::new(params.len(), config.learning_rate);
    let mut best = f64::INFINITY;
    let mut best_params = params.clone();
    let mut stale = 0;
    let mut curve = Vec::new();
    let mut shuffled = train_idx.clone();
    let batch = config.batch_size.clamp(1, shuffled.len());

    for _ in 0..config.max_epochs {
        shuffled.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in shuffled.chunks(batch) {
            let bx = pick(chunk, x);
            let by = pick(chunk, y);
            let (l, g) = net.loss_and_gradient(&bx, &by);
            epoch_loss += l * chunk.len() as f64;
            adam.step(&mut params, &g);
            net.set_params(&params);
        }
        let monitored = if used_validation {
            net.loss(&vx, &vy)
        } else {
            epoch_loss / shuffled.len() as f64
        };
        curve.push(monitored);
        if monitored < best - config.tol {
            best = monitored;
            best_params.clone_from(&params);
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                break;
            }
        }
    }
    if used_validation {
        net.set_params(&best_params);
    }
    let report = FitReport {
        epochs: curve.len(),
        loss_curve: curve,
        used_validation,
    };
    (net, report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupervisedModel {
    pub kind: ModelKind,
    pub layer_sizes: Vec<usize>,
    pub network: Network,
    pub seed_policy: SeedPolicy,
    pub seed: u64,
    /// Class names for a classifier, in output order.
    pub classes: Vec<String>,
    pub feature_names: Vec<String>,
    pub target_name: String,
    /// Applied to regression outputs to return the original unit.
    pub target_scaling: Option<MinMax>,
    pub fit: FitReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Prediction {
    Class(String),
    Value(f64),
}

impl std::fmt::Display for Prediction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Prediction::Class(c) => f.write_str(c),
            Prediction::Value(v) => write!(f, "{v:.4}"),
        }
    }
}

/// Feature matrix and one-hot / column targets for the network.
pub(crate) fn design(data: &PreparedDataset, kind: ModelKind) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<String>, String), EngineError> {
    if data.n_rows() == 0 {
        return Err(EngineError::EmptyTrainingSet);
    }
    if data.features.iter().flatten().any(|v| !v.is_finite()) {
        return Err(EngineError::NonFinite);
    }
    check_matrix(&data.features)?;
    match (kind, &data.target) {
        (ModelKind::Classifier, t) if t.is_classification() => {
            let (idx, classes) = t.class_indices().expect("class target");
            let name = match t {
                Target::Classes { name, .. } | Target::OneHot { name, .. } => name.clone(),
                _ => unreachable!(),
            };
            let y = idx
                .iter()
                .map(|&c| (0..classes.len()).map(|j| f64::from(u8::from(j == c))).collect())
                .collect();
            Ok((data.features.clone(), y, classes, name))
        }
        (ModelKind::Regressor, Target::Regression { name, values }) => {
            let y = values.iter().map(|&v| vec![v]).collect();
            Ok((data.features.clone(), y, Vec::new(), name.clone()))
        }
        (ModelKind::Classifier, _) => Err(EngineError::TargetMismatch("classification needs a class field")),
        (ModelKind::Regressor, _) => Err(EngineError::TargetMismatch("regression needs a regression value field")),
    }
}

pub fn train_supervised(
    train: &PreparedDataset,
    kind: ModelKind,
    seed_policy: SeedPolicy,
    config: &TrainConfig,
) -> Result<SupervisedModel, EngineError> {
    train_with_seed(train, kind, seed_policy, seed_policy.seed(), config)
}

pub(crate) fn train_with_seed(
    train: &PreparedDataset,
    kind: ModelKind,
    seed_policy: SeedPolicy,
    seed: u64,
    config: &TrainConfig,
) -> Result<SupervisedModel, EngineError> {
    let (x, y, classes, target_name) = design(train, kind)?;
    if kind == ModelKind::Classifier {
        let present = y.iter().map(|r| r.iter().position(|&v| v == 1.0)).collect::<std::collections::BTreeSet<_>>();
        if present.len() < 2 {
            return Err(EngineError::SingleClass);
        }
    }
    let output = match kind {
        ModelKind::Classifier => Output::Softmax,
        ModelKind::Regressor => Output::Linear,
    };
    let (network, fit) = fit_network(&x, &y, output, config, seed);
    Ok(SupervisedModel {
        kind,
        layer_sizes: network.layer_sizes(),
        network,
        seed_policy,
        seed,
        classes,
        feature_names: train.feature_names.clone(),
        target_name,
        target_scaling: train.target_scaling,
        fit,
    })
}

impl SupervisedModel {
    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    /// Prediction for an already-normalized feature row.
    pub fn predict_row(&self, x: &[f64]) -> Prediction {
        let out = self.network.forward(x);
        match self.kind {
            ModelKind::Classifier => {
                let best = out
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
                    .map_or(0, |(i, _)| i);
                Prediction::Class(self.classes[best].clone())
            }
            ModelKind::Regressor => {
                let v = out[0];
                Prediction::Value(self.target_scaling.map_or(v, |s| s.invert(v)))
            }
        }
    }

    /// Accuracy for a classifier, R² for a regressor, on normalized rows.
    pub(crate) fn score_rows(&self, x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
        match self.kind {
            ModelKind::Classifier => {
                let hits = x
                    .iter()
                    .zip(y)
                    .filter(|(xi, yi)| argmax(&self.network.forward(xi)) == argmax(yi))
                    .count();
                hits as f64 / x.len() as f64
            }
            ModelKind::Regressor => {
                let pred: Vec<f64> = x.iter().map(|xi| self.network.forward(xi)[0]).collect();
                let truth: Vec<f64> = y.iter().map(|r| r[0]).collect();
                r2_score(&truth, &pred)
            }
        }
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .map_or(0, |(i, _)| i)
}

/// Coefficient of determination; 1 for a perfect fit of a constant target, else 0 when the target is constant.
pub fn r2_score(truth: &[f64], pred: &[f64]) -> f64 {
    let mean = truth.iter().sum::<f64>() / truth.len() as f64;
    let ss_res: f64 = truth.iter().zip(pred).map(|(t, p)| (t - p).powi(2)).sum();
    let ss_tot: f64 = truth.iter().map(|t| (t - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    }
}

/// Normalizes `test_vector` with `normalization_params`, then runs the model.
/// Accuracy or R² of `model` on a held-out prepared dataset.
pub fn evaluate(model: &SupervisedModel, data: &PreparedDataset) -> Result<f64, EngineError> {
    let (x, y, _, _) = design(data, model.kind)?;
    if x[0].len() != model.input_dim() {
        return Err(EngineError::DimensionMismatch {
            expected: model.input_dim(),
            actual: x[0].len(),
        });
    }
    Ok(model.score_rows(&x, &y))
}

pub fn predict(
    model: &SupervisedModel,
    test_vector: &[f64],
    normalization_params: &[Option<MinMax>],
) -> Result<Prediction, EngineError> {
    if test_vector.len() != model.input_dim() {
        return Err(EngineError::DimensionMismatch {
            expected: model.input_dim(),
            actual: test_vector.len(),
        });
    }
    if normalization_params.len() != test_vector.len() {
        return Err(EngineError::DimensionMismatch {
            expected: test_vector.len(),
            actual: normalization_params.len(),
        });
    }
    if test_vector.iter().any(|v| !v.is_finite()) {
        return Err(EngineError::NonFinite);
    }
    let x: Vec<f64> = test_vector
        .iter()
        .zip(normalization_params)
        .map(|(&v, s)| s.map_or(v, |s| s.apply(v)))
        .collect();
    Ok(model.predict_row(&x))
}

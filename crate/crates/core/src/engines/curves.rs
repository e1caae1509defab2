//! Cross-validated learning, performance and scalability curves.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::supervised::{argmax, design, fit_network, r2_score, ModelKind, TrainConfig};
use super::mlp::Output;
use super::EngineError;
use crate::prep::PreparedDataset;

pub const DEFAULT_FOLDS: usize = 10;
pub const DEFAULT_SIZES: [f64; 5] = [0.1, 0.325, 0.55, 0.775, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> MeanStd {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        MeanStd { mean, std: var.sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSet {
    pub kind: ModelKind,
    /// "accuracy" or "r2".
    pub score_name: String,
    pub train_sizes: Vec<usize>,
    pub train_scores: Vec<MeanStd>,
    pub validation_scores: Vec<MeanStd>,
    /// Seconds.
    pub fit_times: Vec<MeanStd>,
}

impl CurveSet {
    pub fn len(&self) -> usize {
        self.train_sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train_sizes.is_empty()
    }
}

fn score(kind: ModelKind, predict: &dyn Fn(&[f64]) -> Vec<f64>, x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    match kind {
        ModelKind::Classifier => {
            let hits = x.iter().zip(y).filter(|(xi, yi)| argmax(&predict(xi)) == argmax(yi)).count();
            hits as f64 / x.len() as f64
        }
        ModelKind::Regressor => {
            let p: Vec<f64> = x.iter().map(|xi| predict(xi)[0]).collect();
            let t: Vec<f64> = y.iter().map(|r| r[0]).collect();
            r2_score(&t, &p)
        }
    }
}

/// k-fold cross-validation at each fraction of the training pool.
///
/// Rows are shuffled once with `seed` and cut into `k_folds` contiguous folds.
/// A training subset holding a single class is scored with a constant predictor.
pub fn learning_curves(
    dataset: &PreparedDataset,
    kind: ModelKind,
    k_folds: usize,
    sizes: &[f64],
    config: &TrainConfig,
    seed: u64,
) -> Result<CurveSet, EngineError> {
    if k_folds < 2 {
        return Err(EngineError::InvalidFolds(k_folds));
    }
    if sizes.is_empty() || sizes.iter().any(|&s| !(s > 0.0 && s <= 1.0)) {
        return Err(EngineError::InvalidSizes);
    }
    let (x, y, _, _) = design(dataset, kind)?;
    let n = x.len();
    if n < k_folds {
        return Err(EngineError::TooFewRows { needed: k_folds, actual: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let bounds: Vec<usize> = (0..=k_folds).map(|f| f * n / k_folds).collect();
    let min_pool = (0..k_folds).map(|f| n - (bounds[f + 1] - bounds[f])).min().unwrap();
    let abs_sizes: Vec<usize> = sizes
        .iter()
        .map(|&s| ((s * min_pool as f64).round() as usize).clamp(1, min_pool))
        .collect();
    let output = match kind {
        ModelKind::Classifier => Output::Softmax,
        ModelKind::Regressor => Output::Linear,
    };
    let pick = |idx: &[usize], m: &[Vec<f64>]| idx.iter().map(|&i| m[i].clone()).collect::<Vec<_>>();

    let mut train_scores = Vec::new();
    let mut val_scores = Vec::new();
    let mut fit_times = Vec::new();
    for &size in &abs_sizes {
        let (mut tr, mut va, mut ft) = (Vec::new(), Vec::new(), Vec::new());
        for f in 0..k_folds {
            let val_idx = &order[bounds[f]..bounds[f + 1]];
            let pool: Vec<usize> = order[..bounds[f]].iter().chain(&order[bounds[f + 1]..]).copied().collect();
            let sub = &pool[..size];
            let (sx, sy) = (pick(sub, &x), pick(sub, &y));
            let (vx, vy) = (pick(val_idx, &x), pick(val_idx, &y));
            let start = Instant::now();
            let single_class = kind == ModelKind::Classifier && sy.iter().all(|r| argmax(r) == argmax(&sy[0]));
            if single_class {
                let constant = sy[0].clone();
                ft.push(start.elapsed().as_secs_f64());
                let p = move |_: &[f64]| constant.clone();
                tr.push(score(kind, &p, &sx, &sy));
                va.push(score(kind, &p, &vx, &vy));
            } else {
                let (net, _) = fit_network(&sx, &sy, output, config, seed.wrapping_add(f as u64));
                ft.push(start.elapsed().as_secs_f64());
                let p = |r: &[f64]| net.forward(r);
                tr.push(score(kind, &p, &sx, &sy));
                va.push(score(kind, &p, &vx, &vy));
            }
        }
        train_scores.push(MeanStd::of(&tr));
        val_scores.push(MeanStd::of(&va));
        fit_times.push(MeanStd::of(&ft));
    }
    Ok(CurveSet {
        kind,
        score_name: match kind {
            ModelKind::Classifier => "accuracy".into(),
            ModelKind::Regressor => "r2".into(),
        },
        train_sizes: abs_sizes,
        train_scores,
        validation_scores: val_scores,
        fit_times,
    })
}

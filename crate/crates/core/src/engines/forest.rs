//! Random forest (CART trees on bootstrap samples) and impurity-based importance.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_matrix, EngineError};
use crate::prep::{PreparedDataset, Target};

pub const DEFAULT_TREES: usize = 100;
pub const DEFAULT_FOREST_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Classification,
    Regression,
}

impl Task {
    /// Classification for a class field, regression for a regression value field.
    pub fn detect(target: &Target) -> Option<Task> {
        match target {
            Target::Classes { .. } | Target::OneHot { .. } => Some(Task::Classification),
            Target::Regression { .. } => Some(Task::Regression),
            Target::None => None,
        }
    }

    fn max_features(self, d: usize) -> usize {
        let m = match self {
            Task::Classification => (d as f64).sqrt().floor() as usize,
            Task::Regression => d / 3,
        };
        m.clamp(1, d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImportanceResult {
    pub task: Task,
    pub importances: Vec<f64>,
    pub n_trees: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf(Vec<f64>),
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

/// Label encoding shared by the split search.
enum Labels<'a> {
    Classes { idx: &'a [usize], n_classes: usize },
    Values(&'a [f64]),
}

impl Labels<'_> {
    /// Impurity times sample count, with the leaf value.
    fn node_stats(&self, rows: &[usize]) -> (f64, Vec<f64>) {
        let n = rows.len() as f64;
        match self {
            Labels::Classes { idx, n_classes } => {
                let mut counts = vec![0.0; *n_classes];
                for &r in rows {
                    counts[idx[r]] += 1.0;
                }
                let gini = 1.0 - counts.iter().map(|c| (c / n).powi(2)).sum::<f64>();
                (gini * n, counts.iter().map(|c| c / n).collect())
            }
            Labels::Values(v) => {
                let mean = rows.iter().map(|&r| v[r]).sum::<f64>() / n;
                let sse = rows.iter().map(|&r| (v[r] - mean).powi(2)).sum::<f64>();
                (sse, vec![mean])
            }
        }
    }

    /// Best threshold on one feature: (weighted impurity of children, threshold).
    fn best_threshold(&self, x: &[Vec<f64>], rows: &[usize], feature: usize) -> Option<(f64, f64)> {
        let mut sorted = rows.to_vec();
        sorted.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]));
        let n = sorted.len();
        let mut best: Option<(f64, f64)> = None;
        match self {
            Labels::Classes { idx, n_classes } => {
                let mut left = vec![0.0; *n_classes];
                let mut right = vec![0.0; *n_classes];
                for &r in &sorted {
                    right[idx[r]] += 1.0;
                }
                for i in 0..n - 1 {
                    let c = idx[sorted[i]];
                    left[c] += 1.0;
                    right[c] -= 1.0;
                    let (a, b) = (x[sorted[i]][feature], x[sorted[i + 1]][feature]);
                    if a == b {
                        continue;
                    }
                    let nl = (i + 1) as f64;
                    let nr = (n - i - 1) as f64;
                    let gl = nl - left.iter().map(|c| c * c).sum::<f64>() / nl;
                    let gr = nr - right.iter().map(|c| c * c).sum::<f64>() / nr;
                    let imp = gl + gr;
                    if best.is_none_or(|(bi, _)| imp < bi) {
                        best = Some((imp, 0.5 * (a + b)));
                    }
                }
            }
            Labels::Values(v) => {
                let total: f64 = sorted.iter().map(|&r| v[r]).sum();
                let total_sq: f64 = sorted.iter().map(|&r| v[r] * v[r]).sum();
                let (mut s, mut sq) = (0.0, 0.0);
                for i in 0..n - 1 {
                    let y = v[sorted[i]];
                    s += y;
                    sq += y * y;
                    let (a, b) = (x[sorted[i]][feature], x[sorted[i + 1]][feature]);
                    if a == b {
                        continue;
                    }
                    let nl = (i + 1) as f64;
                    let nr = (n - i - 1) as f64;
                    let sse_l = sq - s * s / nl;
                    let sse_r = (total_sq - sq) - (total - s).powi(2) / nr;
                    let imp = sse_l.max(0.0) + sse_r.max(0.0);
                    if best.is_none_or(|(bi, _)| imp < bi) {
                        best = Some((imp, 0.5 * (a + b)));
                    }
                }
            }
        }
        best
    }
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    labels: Labels<'a>,
    max_features: usize,
    /// Accumulated impurity decrease per feature.
    gains: Vec<f64>,
}

impl Builder<'_> {
    fn grow(&mut self, rows: &[usize], rng: &mut ChaCha8Rng) -> Node {
        let (impurity, value) = self.labels.node_stats(rows);
        if rows.len() < 2 || impurity <= 1e-12 {
            return Node::Leaf(value);
        }
        let d = self.x[0].len();
        let mut features: Vec<usize> = (0..d).collect();
        features.shuffle(rng);
        let mut best: Option<(f64, usize, f64)> = None;
        for (visited, &f) in features.iter().enumerate() {
            if visited >= self.max_features && best.is_some() {
                break;
            }
            if let Some((imp, thr)) = self.labels.best_threshold(self.x, rows, f) {
                if best.is_none_or(|(bi, _, _)| imp < bi) {
                    best = Some((imp, f, thr));
                }
            }
        }
        let Some((child_imp, feature, threshold)) = best else {
            return Node::Leaf(value);
        };
        self.gains[feature] += (impurity - child_imp).max(0.0);
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| self.x[i][feature] <= threshold);
        Node::Split {
            feature,
            threshold,
            left: Box::new(self.grow(&l, rng)),
            right: Box::new(self.grow(&r, rng)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub task: Task,
    pub trees: Vec<Node>,
    pub classes: Vec<String>,
}

impl Forest {
    /// Class probabilities (classification) or a one-element mean (regression).
    pub fn predict_row(&self, x: &[f64]) -> Vec<f64> {
        let mut acc: Vec<f64> = Vec::new();
        for tree in &self.trees {
            let mut node = tree;
            let leaf = loop {
                match node {
                    Node::Leaf(v) => break v,
                    Node::Split { feature, threshold, left, right } => {
                        node = if x[*feature] <= *threshold { left } else { right };
                    }
                }
            };
            if acc.is_empty() {
                acc = vec![0.0; leaf.len()];
            }
            for (a, v) in acc.iter_mut().zip(leaf) {
                *a += v;
            }
        }
        acc.iter().map(|a| a / self.trees.len() as f64).collect()
    }
}

/// Fits `n_trees` trees and returns the forest with per-feature importances.
pub fn random_forest(
    data: &PreparedDataset,
    task: Task,
    n_trees: usize,
    seed: u64,
) -> Result<(Forest, ImportanceResult), EngineError> {
    if Task::detect(&data.target).is_none() {
        return Err(EngineError::MissingTarget);
    }
    if Task::detect(&data.target) != Some(task) {
        return Err(EngineError::TargetMismatch("task does not match the dataset target"));
    }
    let d = check_matrix(&data.features)?;
    if d < 2 {
        return Err(EngineError::TooFewFeatures(d));
    }
    if n_trees == 0 {
        return Err(EngineError::InvalidTrees);
    }
    let x = &data.features;
    let n = x.len();
    let (class_idx, classes) = data.target.class_indices().unwrap_or_default();
    let values: Vec<f64> = match &data.target {
        Target::Regression { values, .. } => values.clone(),
        _ => Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trees = Vec::with_capacity(n_trees);
    let mut total = vec![0.0; d];
    for _ in 0..n_trees {
        let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let labels = match task {
            Task::Classification => Labels::Classes { idx: &class_idx, n_classes: classes.len() },
            Task::Regression => Labels::Values(&values),
        };
        let mut b = Builder { x, labels, max_features: task.max_features(d), gains: vec![0.0; d] };
        trees.push(b.grow(&rows, &mut rng));
        let s: f64 = b.gains.iter().sum();
        if s > 0.0 {
            for (t, g) in total.iter_mut().zip(&b.gains) {
                *t += g / s;
            }
        }
    }
    let s: f64 = total.iter().sum();
    let importances = if s > 0.0 {
        total.iter().map(|t| t / s).collect()
    } else {
        vec![1.0 / d as f64; d]
    };
    Ok((
        Forest { task, trees, classes },
        ImportanceResult { task, importances, n_trees },
    ))
}

pub fn rf_importance(data: &PreparedDataset, task: Task) -> Result<ImportanceResult, EngineError> {
    random_forest(data, task, DEFAULT_TREES, DEFAULT_FOREST_SEED).map(|(_, r)| r)
}

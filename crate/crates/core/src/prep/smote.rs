//! SMOTE oversampling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PrepError;

/// A generated row: `seed_row + u * (neighbor_row - seed_row)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticRow {
    pub values: Vec<f64>,
    pub label: String,
    pub seed_row: usize,
    pub neighbor_row: usize,
    pub u: f64,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// How many synthetic rows each class receives: each new row goes to the
/// currently smallest class (ties to the lexicographically first label).
pub fn balance_allocation(labels: &[String], n_synthetic: usize) -> BTreeMap<String, usize> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l.clone()).or_default() += 1;
    }
    let mut alloc: BTreeMap<String, usize> = counts.keys().map(|k| (k.clone(), 0)).collect();
    for _ in 0..n_synthetic {
        let Some(smallest) = counts
            .iter()
            .min_by_key(|(_, &c)| c)
            .map(|(k, _)| k.clone())
        else {
            break;
        };
        *counts.get_mut(&smallest).unwrap() += 1;
        *alloc.get_mut(&smallest).unwrap() += 1;
    }
    alloc.retain(|_, n| *n > 0);
    alloc
}

/// Generates synthetic rows per class following `allocation`.
pub fn smote_with_allocation(
    features: &[Vec<f64>],
    labels: &[String],
    k: usize,
    allocation: &BTreeMap<String, usize>,
    seed: u64,
) -> Result<Vec<SyntheticRow>, PrepError> {
    if k < 1 {
        return Err(PrepError::InvalidK(k));
    }
    if features.len() != labels.len() {
        return Err(PrepError::ShapeMismatch(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (class, &n) in allocation {
        if n == 0 {
            continue;
        }
        let members: Vec<usize> = (0..labels.len()).filter(|&i| &labels[i] == class).collect();
        if members.len() <= k {
            return Err(PrepError::SmoteClassTooSmall {
                class: class.clone(),
                count: members.len(),
                k,
            });
        }
        // k nearest same-class neighbours of every member (ties by row index)
        let neighbors: Vec<Vec<usize>> = members
            .iter()
            .map(|&i| {
                let mut others: Vec<(f64, usize)> = members
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| (sq_dist(&features[i], &features[j]), j))
                    .collect();
                others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                others.into_iter().take(k).map(|(_, j)| j).collect()
            })
            .collect();
        for _ in 0..n {
            let m = rng.random_range(0..members.len());
            let seed_row = members[m];
            let neighbor_row = neighbors[m][rng.random_range(0..k)];
            let u: f64 = rng.random();
            let values = features[seed_row]
                .iter()
                .zip(&features[neighbor_row])
                .map(|(x, nb)| x + u * (nb - x))
                .collect();
            out.push(SyntheticRow {
                values,
                label: class.clone(),
                seed_row,
                neighbor_row,
                u,
            });
        }
    }
    Ok(out)
}

/// Generates `n_synthetic` rows, allocated by [`balance_allocation`].
pub fn augment_smote(
    features: &[Vec<f64>],
    labels: &[String],
    k: usize,
    n_synthetic: usize,
    seed: u64,
) -> Result<Vec<SyntheticRow>, PrepError> {
    let allocation = balance_allocation(labels, n_synthetic);
    smote_with_allocation(features, labels, k, &allocation, seed)
}

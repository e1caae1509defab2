use std::collections::BTreeMap;

use super::{check_matrix, EngineError};

/// Per-sample silhouette `(b - a) / max(a, b)` and its mean.
///
/// `a` is the mean distance to the other members of the sample's cluster,
/// `b` the smallest mean distance to another cluster. Samples alone in
/// their cluster score 0.
pub fn silhouette(x: &[Vec<f64>], labels: &[usize]) -> Result<(Vec<f64>, f64), EngineError> {
    check_matrix(x)?;
    if labels.len() != x.len() {
        return Err(EngineError::DimensionMismatch {
            expected: x.len(),
            actual: labels.len(),
        });
    }
    // dense cluster ids
    let ids: BTreeMap<usize, usize> = labels
        .iter()
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();
    let k = ids.len();
    if k < 2 {
        return Err(EngineError::SilhouetteUndefined);
    }
    let dense: Vec<usize> = labels.iter().map(|l| ids[l]).collect();
    let mut sizes = vec![0usize; k];
    for &c in &dense {
        sizes[c] += 1;
    }

    let n = x.len();
    // sums[i][c]: total distance from i to members of cluster c
    let mut sums = vec![vec![0.0; k]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = super::sq_dist(&x[i], &x[j]).sqrt();
            sums[i][dense[j]] += d;
            sums[j][dense[i]] += d;
        }
    }
    let scores: Vec<f64> = (0..n)
        .map(|i| {
            let own = dense[i];
            if sizes[own] == 1 {
                return 0.0;
            }
            let a = sums[i][own] / (sizes[own] - 1) as f64;
            let b = (0..k)
                .filter(|&c| c != own)
                .map(|c| sums[i][c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let m = a.max(b);
            if m == 0.0 {
                0.0
            } else {
                (b - a) / m
            }
        })
        .collect();
    let mean = scores.iter().sum::<f64>() / n as f64;
    Ok((scores, mean))
}

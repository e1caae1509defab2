//! Lloyd's k-means with k-means++ seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::silhouette::silhouette;
use super::{check_matrix, sq_dist, EngineError};

pub const MAX_ITERATIONS: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    #[default]
    PlusPlus,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusteringResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Present when `2 <= k < rows`.
    pub silhouette_per_sample: Option<Vec<f64>>,
    pub silhouette_mean: Option<f64>,
    pub inertia: f64,
    pub iterations: usize,
    /// Inertia after every assignment step.
    pub inertia_history: Vec<f64>,
}

impl ClusteringResult {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k()];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn seed_centroids(x: &[Vec<f64>], k: usize, init: Init, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = x.len();
    match init {
        Init::Random => {
            // k distinct rows, partial Fisher-Yates
            let mut idx: Vec<usize> = (0..n).collect();
            for i in 0..k {
                let j = rng.random_range(i..n);
                idx.swap(i, j);
            }
            idx[..k].iter().map(|&i| x[i].clone()).collect()
        }
        Init::PlusPlus => {
            let mut chosen = vec![rng.random_range(0..n)];
            let mut d2: Vec<f64> = x.iter().map(|p| sq_dist(p, &x[chosen[0]])).collect();
            while chosen.len() < k {
                let total: f64 = d2.iter().sum();
                let next = if total > 0.0 {
                    let mut target = rng.random::<f64>() * total;
                    let mut pick = n - 1;
                    for (i, &w) in d2.iter().enumerate() {
                        if w > 0.0 && target < w {
                            pick = i;
                            break;
                        }
                        target -= w;
                    }
                    while d2[pick] == 0.0 {
                        pick -= 1;
                    }
                    pick
                } else {
                    // every point coincides with a chosen centre
                    let rest: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
                    rest[rng.random_range(0..rest.len())]
                };
                chosen.push(next);
                for (i, p) in x.iter().enumerate() {
                    d2[i] = d2[i].min(sq_dist(p, &x[next]));
                }
            }
            chosen.iter().map(|&i| x[i].clone()).collect()
        }
    }
}

/// Clusters the rows of `x` into `k` groups.
///
/// Empty clusters are re-seeded at the row farthest from its centroid.
pub fn kmeans(x: &[Vec<f64>], k: usize, seed: u64, init: Init) -> Result<ClusteringResult, EngineError> {
    let d = check_matrix(x)?;
    if k == 0 {
        return Err(EngineError::InvalidK { k, rows: x.len() });
    }
    if k > x.len() {
        return Err(EngineError::InvalidK { k, rows: x.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centroids(x, k, init, &mut rng);
    let mut assignments = vec![usize::MAX; x.len()];
    let mut history = Vec::new();
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut changed = false;
        let mut dists = vec![0.0; x.len()];
        for (i, p) in x.iter().enumerate() {
            let (c, dist) = nearest(p, &centroids);
            dists[i] = dist;
            if assignments[i] != c {
                assignments[i] = c;
                changed = true;
            }
        }
        // empty-cluster repair
        let mut sizes = vec![0usize; k];
        for &a in &assignments {
            sizes[a] += 1;
        }
        for c in 0..k {
            if sizes[c] > 0 {
                continue;
            }
            let far = (0..x.len())
                .filter(|&i| sizes[assignments[i]] > 1)
                .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)));
            if let Some(i) = far {
                sizes[assignments[i]] -= 1;
                sizes[c] = 1;
                assignments[i] = c;
                centroids[c] = x[i].clone();
                dists[i] = 0.0;
                changed = true;
            }
        }
        history.push(dists.iter().sum());
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; d]; k];
        for (p, &a) in x.iter().zip(&assignments) {
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            if sizes[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / sizes[c] as f64).collect();
            }
        }
    }

    let inertia = x
        .iter()
        .zip(&assignments)
        .map(|(p, &a)| sq_dist(p, &centroids[a]))
        .sum();
    let (silhouette_per_sample, silhouette_mean) = if k >= 2 && k < x.len() {
        let (s, m) = silhouette(x, &assignments)?;
        (Some(s), Some(m))
    } else {
        (None, None)
    };
    Ok(ClusteringResult {
        assignments,
        centroids,
        silhouette_per_sample,
        silhouette_mean,
        inertia,
        iterations,
        inertia_history: history,
    })
}

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{PrepError, PreparedDataset};

pub const DEFAULT_TRAIN_RATIO: f64 = 0.8;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct SplitDataset {
    pub train: PreparedDataset,
    pub test: PreparedDataset,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub ratio: f64,
    pub seed: u64,
}

/// Row indices of a seeded shuffle-then-partition; train gets `ratio` of the rows.
pub fn split_indices(n: usize, ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>), PrepError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(PrepError::InvalidRatio(ratio));
    }
    if n < 2 {
        return Err(PrepError::TooFewRows { needed: 2, actual: n });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_test = (((1.0 - ratio) * n as f64) - 1e-9).ceil().clamp(1.0, (n - 1) as f64) as usize;
    let test = idx.split_off(n - n_test);
    Ok((idx, test))
}

pub fn split(prepared: &PreparedDataset, ratio: f64, seed: u64) -> Result<SplitDataset, PrepError> {
    let (train_rows, test_rows) = split_indices(prepared.n_rows(), ratio, seed)?;
    Ok(SplitDataset {
        train: prepared.select(&train_rows),
        test: prepared.select(&test_rows),
        train_rows,
        test_rows,
        ratio,
        seed,
    })
}

//! Footprint regressor: 5 hidden ReLU layers of 25 units over the request history.

use serde::Serialize;

use super::record::RequestRecord;
use super::Ledger;
use crate::engines::mlp::{Network, Output};
use crate::engines::{fit_network, TrainConfig};

pub const MIN_TRAINING_RECORDS: usize = 50;
pub const PREDICTOR_HIDDEN: [usize; 5] = [25; 5];
pub const PREDICTOR_SEED: u64 = 1;
const FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FootprintEstimate {
    pub duration_s: f64,
    pub emissions_kg: f64,
    pub trained_on: usize,
}

#[derive(Debug, Clone)]
pub struct FootprintPredictor {
    algorithms: Vec<String>,
    x_mean: Vec<f64>,
    x_std: Vec<f64>,
    y_mean: Vec<f64>,
    y_std: Vec<f64>,
    network: Network,
    trained_on: usize,
}

fn encode(algorithms: &[String], algorithm: &str, n_rows: usize, n_fields: usize) -> Vec<f64> {
    let mut v: Vec<f64> = algorithms.iter().map(|a| f64::from(u8::from(a == algorithm))).collect();
    v.push((n_rows as f64).ln_1p());
    v.push((n_fields as f64).ln_1p());
    v
}

fn moments(rows: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let std = (0..d)
        .map(|j| {
            let s = (rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n).sqrt();
            if s > 0.0 { s } else { 1.0 }
        })
        .collect();
    (mean, std)
}

fn standardize(v: &[f64], mean: &[f64], std: &[f64]) -> Vec<f64> {
    v.iter().zip(mean).zip(std).map(|((x, m), s)| (x - m) / s).collect()
}

impl FootprintPredictor {
    pub fn config() -> TrainConfig {
        TrainConfig {
            hidden: PREDICTOR_HIDDEN.to_vec(),
            ..TrainConfig::default()
        }
    }

    /// `None` below [`MIN_TRAINING_RECORDS`].
    pub fn train(records: &[RequestRecord]) -> Option<FootprintPredictor> {
        if records.len() < MIN_TRAINING_RECORDS {
            return None;
        }
        let mut algorithms: Vec<String> = records.iter().map(|r| r.algorithm.clone()).collect();
        algorithms.sort();
        algorithms.dedup();
        let x: Vec<Vec<f64>> = records
            .iter()
            .map(|r| encode(&algorithms, &r.algorithm, r.n_rows, r.n_fields))
            .collect();
        // log targets: durations span orders of magnitude
        let y: Vec<Vec<f64>> = records
            .iter()
            .map(|r| vec![(r.duration_s + FLOOR).ln(), (r.emissions_kg + FLOOR).ln()])
            .collect();
        let (x_mean, x_std) = moments(&x);
        let (y_mean, y_std) = moments(&y);
        let xs: Vec<Vec<f64>> = x.iter().map(|r| standardize(r, &x_mean, &x_std)).collect();
        let ys: Vec<Vec<f64>> = y.iter().map(|r| standardize(r, &y_mean, &y_std)).collect();
        let (network, _) = fit_network(&xs, &ys, Output::Linear, &Self::config(), PREDICTOR_SEED);
        Some(FootprintPredictor {
            algorithms,
            x_mean,
            x_std,
            y_mean,
            y_std,
            network,
            trained_on: records.len(),
        })
    }

    pub fn predict(&self, algorithm: &str, n_rows: usize, n_fields: usize) -> FootprintEstimate {
        let x = standardize(&encode(&self.algorithms, algorithm, n_rows, n_fields), &self.x_mean, &self.x_std);
        let out = self.network.forward(&x);
        let back = |i: usize| ((out[i] * self.y_std[i] + self.y_mean[i]).exp() - FLOOR).max(0.0);
        FootprintEstimate {
            duration_s: back(0),
            emissions_kg: back(1),
            trained_on: self.trained_on,
        }
    }
}

/// Estimated duration and emissions, or `None` while the ledger is too short.
pub fn predict_footprint(algorithm: &str, n_rows: usize, n_fields: usize, ledger: &Ledger) -> Option<FootprintEstimate> {
    ledger.predictor().map(|p| p.predict(algorithm, n_rows, n_fields))
}

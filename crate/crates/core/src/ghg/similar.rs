use serde::Serialize;

use super::record::RequestRecord;
use crate::engines::{kmeans, Init};

pub const MAX_SIMILAR: usize = 10;
pub const MAX_SIMILARITY_CLUSTERS: usize = 20;
pub const SIMILARITY_SEED: u64 = 1;

/// Request about to be launched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prospective {
    pub algorithm: String,
    pub dataset_name: String,
    pub n_rows: usize,
    pub n_fields: usize,
}

/// `ceil(sqrt(n / 2))`, capped.
pub fn default_cluster_count(ledger_len: usize) -> usize {
    ((ledger_len as f64 / 2.0).sqrt().ceil() as usize).clamp(1, MAX_SIMILARITY_CLUSTERS)
}

/// Ledger members that share the prospective request's k-means cluster,
/// exact duplicates first, then most recent first.
pub fn similar_requests(
    prospective: &Prospective,
    records: &[RequestRecord],
    n_clusters: Option<usize>,
) -> Vec<RequestRecord> {
    if records.is_empty() {
        return Vec::new();
    }
    let mut algorithms: Vec<&str> = records.iter().map(|r| r.algorithm.as_str()).collect();
    algorithms.push(&prospective.algorithm);
    algorithms.sort_unstable();
    algorithms.dedup();
    let encode = |alg: &str, rows: usize, fields: usize| {
        let mut v: Vec<f64> = algorithms.iter().map(|a| f64::from(u8::from(*a == alg))).collect();
        v.push(rows as f64);
        v.push(fields as f64);
        v
    };
    let mut x: Vec<Vec<f64>> = records.iter().map(|r| encode(&r.algorithm, r.n_rows, r.n_fields)).collect();
    x.push(encode(&prospective.algorithm, prospective.n_rows, prospective.n_fields));

    let d = x[0].len();
    let n = x.len() as f64;
    for j in 0..d {
        let mean = x.iter().map(|r| r[j]).sum::<f64>() / n;
        let std = (x.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n).sqrt();
        for r in &mut x {
            r[j] = if std > 0.0 { (r[j] - mean) / std } else { 0.0 };
        }
    }
    let mut distinct = x.clone();
    distinct.sort_by(|a, b| a.iter().zip(b).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    distinct.dedup();
    let k = n_clusters
        .unwrap_or_else(|| default_cluster_count(records.len()))
        .clamp(1, distinct.len());
    let result = match kmeans(&x, k, SIMILARITY_SEED, Init::PlusPlus) {
        Ok(r) => r,
        Err(_) => return Vec::new(),
    };
    let own = *result.assignments.last().unwrap();
    let mut members: Vec<&RequestRecord> = records
        .iter()
        .zip(&result.assignments)
        .rev()
        .filter(|(_, &a)| a == own)
        .map(|(r, _)| r)
        .collect();
    // stable: exact duplicates first, recency kept within each group
    members.sort_by_key(|r| {
        !(r.algorithm == prospective.algorithm && r.n_rows == prospective.n_rows && r.n_fields == prospective.n_fields)
    });
    members.into_iter().take(MAX_SIMILAR).cloned().collect()
}

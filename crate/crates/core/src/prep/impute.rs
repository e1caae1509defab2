//! k-nearest-neighbour imputation of missing (NaN) cells.

use super::PrepError;

/// Euclidean distance over coordinates observed in both rows; `None` when
/// the rows share no observed coordinate.
fn masked_distance(a: &[f64], b: &[f64]) -> Option<f64> {
    let mut sum = 0.0;
    let mut shared = 0;
    for (x, y) in a.iter().zip(b) {
        if !x.is_nan() && !y.is_nan() {
            sum += (x - y) * (x - y);
            shared += 1;
        }
    }
    (shared > 0).then(|| sum.sqrt())
}

/// Fills each missing cell with the mean of that column over the `k` nearest
/// rows that observe it. Observed cells are never changed. When fewer than
/// `k` rows observe a column, all of them are used.
pub fn impute_knn(matrix: &[Vec<f64>], k: usize) -> Result<Vec<Vec<f64>>, PrepError> {
    if k < 1 {
        return Err(PrepError::InvalidK(k));
    }
    let n_cols = matrix.first().map_or(0, Vec::len);
    if matrix.iter().any(|r| r.len() != n_cols) {
        return Err(PrepError::ShapeMismatch("rows have different lengths".into()));
    }
    for c in 0..n_cols {
        if matrix.iter().all(|r| r[c].is_nan()) {
            return Err(PrepError::AllMissingColumn(c));
        }
    }
    let mut out = matrix.to_vec();
    for (i, row) in matrix.iter().enumerate() {
        if !row.iter().any(|v| v.is_nan()) {
            continue;
        }
        if row.iter().all(|v| v.is_nan()) {
            return Err(PrepError::AllMissingRow(i));
        }
        for c in (0..n_cols).filter(|&c| row[c].is_nan()) {
            let mut donors: Vec<(f64, usize)> = matrix
                .iter()
                .enumerate()
                .filter(|(j, r)| *j != i && !r[c].is_nan())
                .map(|(j, r)| (masked_distance(row, r).unwrap_or(f64::INFINITY), j))
                .collect();
            donors.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            donors.truncate(k);
            out[i][c] = donors.iter().map(|&(_, j)| matrix[j][c]).sum::<f64>() / donors.len() as f64;
        }
    }
    Ok(out)
}

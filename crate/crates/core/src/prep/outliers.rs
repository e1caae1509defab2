use std::collections::BTreeSet;

use super::PrepError;

/// Quantile by linear interpolation between order statistics of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Tukey fences `[Q1 - 1.5 IQR, Q3 + 1.5 IQR]`.
pub fn iqr_fences(column: &[f64]) -> Result<(f64, f64), PrepError> {
    let mut sorted: Vec<f64> = column.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.len() < 4 {
        return Err(PrepError::InsufficientQuartileData);
    }
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    Ok((q1 - 1.5 * iqr, q3 + 1.5 * iqr))
}

/// Indices of values outside the IQR fences. Non-finite values are ignored.
pub fn detect_outliers_iqr(column: &[f64]) -> Result<BTreeSet<usize>, PrepError> {
    let (lo, hi) = iqr_fences(column)?;
    Ok(column
        .iter()
        .enumerate()
        .filter(|(_, &v)| v.is_finite() && (v < lo || v > hi))
        .map(|(i, _)| i)
        .collect())
}

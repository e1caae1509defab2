//! Feature-importance-weighted error of generated (imputed or augmented) data.

use super::PrepError;

fn mean_std(rows: &[Vec<f64>], c: usize) -> (f64, f64) {
    let vals: Vec<f64> = rows.iter().map(|r| r[c]).filter(|v| !v.is_nan()).collect();
    if vals.is_empty() {
        return (0.0, 0.0);
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Per-feature error: |mean(original) - mean(generated)| / std(original);
/// zero-variance features score 0.
pub fn feature_errors(original: &[Vec<f64>], generated: &[Vec<f64>]) -> Result<Vec<f64>, PrepError> {
    let d = original.first().map_or(0, Vec::len);
    if original.iter().chain(generated).any(|r| r.len() != d) {
        return Err(PrepError::ShapeMismatch("matrices must share the column count".into()));
    }
    Ok((0..d)
        .map(|c| {
            let (m0, s0) = mean_std(original, c);
            let (m1, _) = mean_std(generated, c);
            if s0 == 0.0 || generated.is_empty() {
                0.0
            } else {
                (m0 - m1).abs() / s0
            }
        })
        .collect())
}

/// `Σ_f importance_f · error_f`.
pub fn weighted_error(errors: &[f64], importances: &[f64]) -> Result<f64, PrepError> {
    if errors.len() != importances.len() {
        return Err(PrepError::ShapeMismatch(format!(
            "{} importances for {} features",
            importances.len(),
            errors.len()
        )));
    }
    let total: f64 = importances.iter().sum();
    if importances.iter().any(|&w| w < 0.0 || !w.is_finite()) || (total - 1.0).abs() > 1e-9 {
        return Err(PrepError::Importance(total));
    }
    Ok(errors.iter().zip(importances).map(|(e, w)| e * w).sum())
}

pub fn xgewfi_score(original: &[Vec<f64>], generated: &[Vec<f64>], importances: &[f64]) -> Result<f64, PrepError> {
    weighted_error(&feature_errors(original, generated)?, importances)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_data_scores_zero() {
        let m = vec![vec![1.0, 5.0], vec![2.0, 3.0], vec![4.0, 4.0]];
        assert_eq!(xgewfi_score(&m, &m, &[0.5, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn one_hot_importance_selects_feature() {
        let orig = vec![vec![0.0, 0.0], vec![2.0, 4.0]];
        let gen = vec![vec![2.0, 1.0], vec![2.0, 1.0]];
        let errs = feature_errors(&orig, &gen).unwrap();
        assert_eq!(errs, vec![1.0, 0.5]);
        assert_eq!(xgewfi_score(&orig, &gen, &[0.0, 1.0]).unwrap(), errs[1]);
    }

    #[test]
    fn uniform_weights_average_errors() {
        let s = weighted_error(&[0.2, 0.4], &[0.5, 0.5]).unwrap();
        assert!((s - 0.3).abs() < 1e-15);
    }

    #[test]
    fn importances_must_sum_to_one() {
        assert!(matches!(weighted_error(&[0.2, 0.4], &[0.5, 0.6]), Err(PrepError::Importance(_))));
        assert!(weighted_error(&[0.2, 0.4], &[1.5, -0.5]).is_err());
    }

    #[test]
    fn constant_feature_contributes_nothing() {
        let orig = vec![vec![3.0], vec![3.0]];
        let gen = vec![vec![9.0]];
        assert_eq!(feature_errors(&orig, &gen).unwrap(), vec![0.0]);
    }
}

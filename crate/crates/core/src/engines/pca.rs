use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::{check_matrix, EngineError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcaResult {
    /// `n_components x d`, orthonormal rows.
    pub components: Vec<Vec<f64>>,
    /// Eigenvalues of the kept components.
    pub explained_variance: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    pub projected: Vec<Vec<f64>>,
    /// Sample covariance of the input, divisor `rows - 1`.
    pub covariance: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
}

impl PcaResult {
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    /// Back-projects `projected` into the original (uncentered) space.
    pub fn reconstruct(&self) -> Vec<Vec<f64>> {
        self.projected
            .iter()
            .map(|z| {
                let mut x = self.mean.clone();
                for (zi, comp) in z.iter().zip(&self.components) {
                    for (xj, cj) in x.iter_mut().zip(comp) {
                        *xj += zi * cj;
                    }
                }
                x
            })
            .collect()
    }
}

pub fn pca(x: &[Vec<f64>], n_components: usize) -> Result<PcaResult, EngineError> {
    let d = check_matrix(x)?;
    let n = x.len();
    let max = (n.saturating_sub(1)).min(d);
    if n_components < 1 || n_components > max {
        return Err(EngineError::InvalidComponents { requested: n_components, max });
    }
    let mean: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let centered = DMatrix::from_fn(n, d, |i, j| x[i][j] - mean[j]);
    let mut cov = centered.transpose() * &centered / (n as f64 - 1.0);
    // exact symmetry for the eigen solver and the reported matrix
    for i in 0..d {
        for j in 0..i {
            let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    let eig = SymmetricEigen::new(cov.clone());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let total: f64 = eig.eigenvalues.iter().map(|&l| l.max(0.0)).sum();

    let mut components = Vec::with_capacity(n_components);
    let mut variance = Vec::with_capacity(n_components);
    let mut ratio = Vec::with_capacity(n_components);
    for &idx in order.iter().take(n_components) {
        let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        let lead = v
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
            .map(|(_, c)| c)
            .unwrap_or(1.0);
        if lead < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        let lambda = eig.eigenvalues[idx].max(0.0);
        variance.push(lambda);
        ratio.push(if total > 0.0 { lambda / total } else { 0.0 });
        components.push(v);
    }
    let projected = (0..n)
        .map(|i| {
            components
                .iter()
                .map(|c| c.iter().enumerate().map(|(j, cj)| centered[(i, j)] * cj).sum())
                .collect()
        })
        .collect();
    let covariance = (0..d).map(|i| (0..d).map(|j| cov[(i, j)]).collect()).collect();
    Ok(PcaResult {
        components,
        explained_variance: variance,
        explained_variance_ratio: ratio,
        projected,
        covariance,
        mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_line() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, i as f64]).collect();
        let r = pca(&x, 1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.components[0][0] - s).abs() < 1e-9);
        assert!((r.components[0][1] - s).abs() < 1e-9);
        assert!((r.explained_variance_ratio[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_d_covariance_is_two_by_two() {
        let x = vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![4.0, 4.0]];
        let r = pca(&x, 2).unwrap();
        assert_eq!(r.covariance.len(), 2);
        assert_eq!(r.covariance[0][1], r.covariance[1][0]);
        // var of (1,2,4) with divisor 2
        assert!((r.covariance[0][0] - 7.0 / 3.0).abs() < 1e-12);
        let sum: f64 = r.explained_variance_ratio.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn component_range() {
        let x = vec![vec![1.0, 2.0, 3.0], vec![2.0, 1.0, 0.0], vec![4.0, 4.0, 1.0]];
        assert!(pca(&x, 0).is_err());
        assert!(pca(&x, 3).is_err());
        assert!(pca(&x, 2).is_ok());
    }

    #[test]
    fn sign_convention() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![-(i as f64), 0.1 * (i % 3) as f64]).collect();
        let r = pca(&x, 2).unwrap();
        for c in &r.components {
            let lead = c.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
            assert!(lead > 0.0);
        }
    }
}

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Dataset;
use crate::error::{Error, Result};
use crate::problem::{nuclear_norm, ObservedEntries, SparseMatrix};

/// Probability that a synthetic feature is present.
pub const FEATURE_DENSITY: f64 = 0.15;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthLogistic {
    pub dataset: Dataset,
    pub planted: Vec<f64>,
}

/// Binary sparse features with labels from a planted `sparsity`-sparse
/// linear model. Label noise is Gaussian with standard deviation
/// `std(scores) / margin`, so an infinite margin gives data separated by the
/// planted vector (`sgn(0) = +1`).
pub fn synth_logistic(
    seed: u64,
    samples: usize,
    dim: usize,
    sparsity: usize,
    margin: f64,
) -> Result<SynthLogistic> {
    if samples == 0 || dim == 0 {
        return Err(Error::InvalidArgument("synthetic data needs N, d >= 1".into()));
    }
    if sparsity == 0 || sparsity > dim {
        return Err(Error::InvalidArgument(format!(
            "planted sparsity must lie in 1..={dim}, got {sparsity}"
        )));
    }
    if !(margin > 0.0) {
        return Err(Error::InvalidArgument(format!("margin must be positive, got {margin}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut planted = vec![0.0; dim];
    let mut support = index::sample(&mut rng, dim, sparsity).into_vec();
    support.sort_unstable();
    for j in support {
        planted[j] = rng.sample(StandardNormal);
    }

    let rows: Vec<Vec<(usize, f64)>> = (0..samples)
        .map(|_| {
            (0..dim)
                .filter(|_| rng.random::<f64>() < FEATURE_DENSITY)
                .map(|j| (j, 1.0))
                .collect()
        })
        .collect();
    let features = SparseMatrix::from_rows(dim, &rows)?;
    let scores: Vec<f64> = (0..samples).map(|i| features.row_dot(i, &planted)).collect();
    let mean = scores.iter().sum::<f64>() / samples as f64;
    let std = (scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / samples as f64).sqrt();
    let noise_scale = std / margin;
    let labels = scores
        .iter()
        .map(|s| {
            let e: f64 = rng.sample(StandardNormal);
            if s + noise_scale * e >= 0.0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    Ok(SynthLogistic {
        dataset: Dataset::new(features, labels)?,
        planted,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthLowRank {
    pub observed: ObservedEntries,
    /// `m x r`, row-major.
    pub left: Vec<f64>,
    /// `n x r`, row-major.
    pub right: Vec<f64>,
    pub rank: usize,
}

impl SynthLowRank {
    /// Row-major `left * right^T`.
    pub fn ground_truth(&self) -> Vec<f64> {
        let (m, n) = self.observed.shape();
        let r = self.rank;
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                out[i * n + j] = (0..r).map(|t| self.left[i * r + t] * self.right[j * r + t]).sum();
            }
        }
        out
    }

    pub fn ground_truth_nuclear_norm(&self) -> f64 {
        let (m, n) = self.observed.shape();
        nuclear_norm(m, n, &self.ground_truth())
    }
}

/// `A = U V^T + noise` with Gaussian factors (`V` scaled by `1/sqrt(r)`),
/// observed on `round(density * m * n)` uniformly sampled entries.
pub fn synth_lowrank(
    seed: u64,
    rows: usize,
    cols: usize,
    rank: usize,
    density: f64,
    noise: f64,
) -> Result<SynthLowRank> {
    if rows == 0 || cols == 0 || rank == 0 || rank > rows.min(cols) {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= r <= min(m, n), got r = {rank} for ({rows}, {cols})"
        )));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidArgument(format!("density must lie in (0, 1], got {density}")));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise must be non-negative, got {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (rank as f64).sqrt();
    let left: Vec<f64> = (0..rows * rank).map(|_| rng.sample(StandardNormal)).collect();
    let right: Vec<f64> = (0..cols * rank)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let total = rows * cols;
    let count = ((density * total as f64).round() as usize).clamp(1, total);
    let mut picked = index::sample(&mut rng, total, count).into_vec();
    picked.sort_unstable();
    let entries = picked
        .into_iter()
        .map(|p| {
            let (i, j) = (p / cols, p % cols);
            let clean: f64 = (0..rank).map(|t| left[i * rank + t] * right[j * rank + t]).sum();
            let e: f64 = rng.sample(StandardNormal);
            (i, j, clean + noise * e)
        })
        .collect();
    Ok(SynthLowRank {
        observed: ObservedEntries::new((rows, cols), entries)?,
        left,
        right,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_is_deterministic_and_separable_without_noise() {
        let a = synth_logistic(7, 100, 20, 5, f64::INFINITY).unwrap();
        let b = synth_logistic(7, 100, 20, 5, f64::INFINITY).unwrap();
        assert_eq!(a, b);
        let ds = &a.dataset;
        for i in 0..ds.samples() {
            let s = ds.features.row_dot(i, &a.planted);
            assert_eq!(if s >= 0.0 { 1.0 } else { -1.0 }, ds.labels[i]);
        }
        assert_eq!(a.planted.iter().filter(|v| **v != 0.0).count(), 5);
        assert_ne!(a, synth_logistic(8, 100, 20, 5, f64::INFINITY).unwrap());
    }

    #[test]
    fn lowrank_counts_and_rank() {
        let s = synth_lowrank(1, 2, 2, 1, 1.0, 0.0).unwrap();
        assert_eq!(s.observed.len(), 4);
        let a = s.observed.to_dense();
        assert!((a[0] * a[3] - a[1] * a[2]).abs() < 1e-12);

        let s = synth_lowrank(3, 30, 20, 2, 0.13, 0.1).unwrap();
        assert_eq!(s.observed.len(), (0.13f64 * 600.0).round() as usize);
        assert_eq!(s, synth_lowrank(3, 30, 20, 2, 0.13, 0.1).unwrap());
        assert!(synth_lowrank(3, 3, 3, 4, 0.5, 0.0).is_err());
        assert!(synth_lowrank(3, 3, 3, 1, 0.0, 0.0).is_err());
    }
}

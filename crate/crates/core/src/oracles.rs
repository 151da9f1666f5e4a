//! First-order oracles: sparse logistic regression, observed-entry matrix
//! completion and a shifted quadratic with a closed-form constrained minimizer.

use crate::error::{Error, Result};
use crate::linalg::{self, PowerIteration};
use crate::lowrank::LowRankIterate;
use crate::problem::{ObservedEntries, Objective, SparseMatrix};

/// `ln(1 + e^t)` without overflow or cancellation.
pub fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// `1 / (1 + e^{-t})`.
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Average logistic loss over labelled rows of a sparse feature matrix.
#[derive(Debug, Clone)]
pub struct LogisticProblem {
    features: SparseMatrix,
    labels: Vec<f64>,
}

impl LogisticProblem {
    pub fn new(features: SparseMatrix, labels: Vec<f64>) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(Error::InvalidArgument("logistic problem needs at least one row".into()));
        }
        if labels.len() != features.nrows() {
            return Err(Error::DimensionMismatch {
                expected: features.nrows(),
                found: labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&b| b != 1.0 && b != -1.0) {
            return Err(Error::InvalidLabel(bad));
        }
        Ok(LogisticProblem { features, labels })
    }

    pub fn features(&self) -> &SparseMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn samples(&self) -> usize {
        self.labels.len()
    }
}

impl Objective for LogisticProblem {
    fn dim(&self) -> usize {
        self.features.ncols()
    }

    fn evaluate(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let n = self.samples() as f64;
        let mut value = 0.0;
        let mut grad = vec![0.0; x.len()];
        for (i, &b) in self.labels.iter().enumerate() {
            let margin = b * self.features.row_dot(i, x);
            value += softplus(-margin);
            let weight = -b * sigmoid(-margin) / n;
            let (idx, val) = self.features.row(i);
            for (&j, a) in idx.iter().zip(val) {
                grad[j] += weight * a;
            }
        }
        Ok((value / n, grad))
    }
}

/// `sigma_1(A)^2 / (4N)`, a global bound on the logistic Hessian.
pub fn estimate_lipschitz(p: &LogisticProblem) -> f64 {
    match linalg::top_singular_pair(p.features(), &PowerIteration::default()) {
        Ok(pair) => pair.value * pair.value / (4.0 * p.samples() as f64),
        Err(Error::ZeroGradient) => 0.0,
        Err(_) => {
            let opts = PowerIteration {
                max_iters: 20_000,
                ..PowerIteration::default()
            };
            linalg::top_singular_pair(p.features(), &opts)
                .map(|pair| pair.value * pair.value / (4.0 * p.samples() as f64))
                .unwrap_or(0.0)
        }
    }
}

/// `1/2 * sum_{(i,j) in K} (X_ij - A_ij)^2` over a nuclear-norm-bounded `X`.
#[derive(Debug, Clone)]
pub struct CompletionProblem {
    observed: ObservedEntries,
}

impl CompletionProblem {
    pub fn new(observed: ObservedEntries) -> Result<Self> {
        if observed.is_empty() {
            return Err(Error::InvalidArgument("matrix completion needs observed entries".into()));
        }
        Ok(CompletionProblem { observed })
    }

    pub fn observed(&self) -> &ObservedEntries {
        &self.observed
    }

    pub fn shape(&self) -> (usize, usize) {
        self.observed.shape()
    }

    /// Value and gradient values (in pattern order) from the iterate's values
    /// on the observed entries.
    pub fn evaluate_observed(&self, x_observed: &[f64]) -> Result<(f64, Vec<f64>)> {
        let entries = self.observed.entries();
        if x_observed.len() != entries.len() {
            return Err(Error::DimensionMismatch {
                expected: entries.len(),
                found: x_observed.len(),
            });
        }
        let residual: Vec<f64> = x_observed
            .iter()
            .zip(entries)
            .map(|(x, &(_, _, a))| x - a)
            .collect();
        let value = 0.5 * linalg::dot(&residual, &residual);
        Ok((value, residual))
    }

    /// Value and the sparse gradient `(X - A)` restricted to the observed set.
    pub fn evaluate(&self, x: &LowRankIterate) -> Result<(f64, ObservedEntries)> {
        x.check_pattern(self.shape(), self.observed.len())?;
        let (value, grad) = self.evaluate_observed(x.observed_values())?;
        Ok((value, self.observed.with_values(&grad)?))
    }
}

/// `1/2 ||x - c||^2`.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    center: Vec<f64>,
}

impl QuadraticProblem {
    pub fn new(center: Vec<f64>) -> Result<Self> {
        if center.is_empty() || !linalg::all_finite(&center) {
            return Err(Error::InvalidArgument("quadratic center must be finite and non-empty".into()));
        }
        Ok(QuadraticProblem { center })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// Minimizer over the l2 ball of radius `radius` with its objective value.
    /// The center must lie outside the open ball; a center on the sphere is
    /// its own minimizer.
    pub fn argmin_l2(&self, radius: f64) -> Result<(Vec<f64>, f64)> {
        let norm = linalg::norm2(&self.center);
        if norm < radius || norm == 0.0 {
            return Err(Error::InactiveConstraint);
        }
        let scale = radius / norm;
        let x = self.center.iter().map(|c| scale * c).collect();
        Ok((x, 0.5 * (norm - radius).powi(2)))
    }
}

impl Objective for QuadraticProblem {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn evaluate(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        if x.len() != self.center.len() {
            return Err(Error::DimensionMismatch {
                expected: self.center.len(),
                found: x.len(),
            });
        }
        let grad = linalg::sub(x, &self.center);
        Ok((0.5 * linalg::dot(&grad, &grad), grad))
    }

    fn lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
}

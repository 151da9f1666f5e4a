//! Problem fixtures shared by the benchmarks.

use extrafw_core::data_io::{synth_logistic, synth_lowrank};
use extrafw_core::{CompletionProblem, LogisticProblem, QuadraticProblem};

/// `1/2 ||x - c||^2` with `c = (2, 0, ..., 0)`.
pub fn quadratic(dim: usize) -> QuadraticProblem {
    let mut c = vec![0.0; dim];
    c[0] = 2.0;
    QuadraticProblem::new(c).expect("finite center")
}

pub fn logistic(samples: usize, dim: usize, seed: u64) -> LogisticProblem {
    let ds = synth_logistic(seed, samples, dim, 10, 2.0).expect("valid sizes");
    LogisticProblem::new(ds.dataset.features, ds.dataset.labels).expect("labels are +-1")
}

pub fn completion(side: usize, rank: usize, seed: u64) -> CompletionProblem {
    let lr = synth_lowrank(seed, side, side, rank, 0.1, 0.01).expect("valid sizes");
    CompletionProblem::new(lr.observed).expect("nonempty")
}

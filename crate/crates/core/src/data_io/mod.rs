//! Dataset ingestion (LIBSVM, MovieLens) and seeded synthetic generators.

mod libsvm;
mod movielens;
mod synth;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::problem::{ObservedEntries, SparseMatrix};

pub use libsvm::{parse_libsvm, parse_libsvm_str, read_libsvm, serialize_libsvm};
pub use movielens::{parse_movielens, parse_movielens_str, read_movielens};
pub use synth::{synth_logistic, synth_lowrank, SynthLogistic, SynthLowRank, FEATURE_DENSITY};

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: SparseMatrix,
    pub labels: Vec<f64>,
    pub feature_names: Option<Vec<String>>,
    pub split: Option<Split>,
}

impl Dataset {
    pub fn new(features: SparseMatrix, labels: Vec<f64>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.nrows(),
                found: labels.len(),
            });
        }
        Ok(Dataset {
            features,
            labels,
            feature_names: None,
            split: None,
        })
    }

    pub fn samples(&self) -> usize {
        self.labels.len()
    }

    fn subset(&self, rows: &[usize]) -> (SparseMatrix, Vec<f64>) {
        (
            self.features.select_rows(rows),
            rows.iter().map(|&i| self.labels[i]).collect(),
        )
    }

    /// Training rows, or every row when there is no split.
    pub fn train(&self) -> (SparseMatrix, Vec<f64>) {
        match &self.split {
            Some(s) => self.subset(&s.train),
            None => (self.features.clone(), self.labels.clone()),
        }
    }

    pub fn test(&self) -> Option<(SparseMatrix, Vec<f64>)> {
        self.split.as_ref().map(|s| self.subset(&s.test))
    }

    /// SHA-256 over shape, sparse structure, values and labels (little-endian).
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        let (indptr, indices, values) = self.features.parts();
        h.update((self.features.nrows() as u64).to_le_bytes());
        h.update((self.features.ncols() as u64).to_le_bytes());
        for &p in indptr.iter().chain(indices) {
            h.update((p as u64).to_le_bytes());
        }
        for v in values.iter().chain(&self.labels) {
            h.update(v.to_bits().to_le_bytes());
        }
        hex(&h.finalize())
    }
}

/// SHA-256 over the shape and `(row, col, value)` triplets of observed entries.
pub fn observed_hash(obs: &ObservedEntries) -> String {
    let mut h = Sha256::new();
    let (m, n) = obs.shape();
    h.update((m as u64).to_le_bytes());
    h.update((n as u64).to_le_bytes());
    for &(i, j, v) in obs.entries() {
        h.update((i as u64).to_le_bytes());
        h.update((j as u64).to_le_bytes());
        h.update(v.to_bits().to_le_bytes());
    }
    hex(&h.finalize())
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// One-vs-rest labels: `positive` becomes `+1`, everything else `-1`.
pub fn map_labels(mut ds: Dataset, positive: f64) -> Result<Dataset> {
    for b in ds.labels.iter_mut() {
        *b = if *b == positive { 1.0 } else { -1.0 };
    }
    if ds.labels.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::DegenerateLabels);
    }
    Ok(ds)
}

/// Shuffled split with `round(fraction * N)` training rows.
pub fn train_test_split(mut ds: Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "split fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let n = ds.samples();
    let n_train = (fraction * n as f64).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::InvalidArgument(format!(
            "fraction {fraction} of {n} rows leaves an empty side"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = idx.split_off(n_train);
    ds.split = Some(Split { train: idx, test });
    Ok(ds)
}

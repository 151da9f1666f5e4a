//! Factored matrix iterate: a weighted sum of rank-1 atoms together with its
//! values on the observed entries. The dense matrix is never formed during a
//! solve.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lmo::Rank1Atom;

#[derive(Debug, Clone)]
pub struct LowRankIterate {
    shape: (usize, usize),
    atoms: Vec<Arc<Rank1Atom>>,
    weights: Vec<f64>,
    observed: Vec<f64>,
}

impl LowRankIterate {
    /// The zero matrix, with a value cache sized for `observed_len` entries.
    pub fn zero(shape: (usize, usize), observed_len: usize) -> Self {
        LowRankIterate {
            shape,
            atoms: Vec::new(),
            weights: Vec::new(),
            observed: vec![0.0; observed_len],
        }
    }

    /// A single atom with weight one.
    pub fn from_atom(atom: Rank1Atom, pattern: &[(usize, usize, f64)]) -> Self {
        let shape = atom.shape();
        let observed = pattern.iter().map(|&(i, j, _)| atom.entry(i, j)).collect();
        LowRankIterate {
            shape,
            atoms: vec![Arc::new(atom)],
            weights: vec![1.0],
            observed,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, &Rank1Atom)> {
        self.weights.iter().copied().zip(self.atoms.iter().map(|a| a.as_ref()))
    }

    /// Values of the iterate on the observed entries, in pattern order.
    pub fn observed_values(&self) -> &[f64] {
        &self.observed
    }

    /// `(1 - delta) X + delta V`. Zero-scale atoms are not stored, and a zero
    /// `1 - delta` drops the previous atoms.
    pub fn combine(
        &self,
        atom: &Arc<Rank1Atom>,
        delta: f64,
        pattern: &[(usize, usize, f64)],
    ) -> LowRankIterate {
        let keep = 1.0 - delta;
        let (mut atoms, mut weights) = if keep == 0.0 {
            (Vec::new(), Vec::new())
        } else {
            (
                self.atoms.clone(),
                self.weights.iter().map(|w| w * keep).collect(),
            )
        };
        let observed = self
            .observed
            .iter()
            .zip(pattern)
            .map(|(x, &(i, j, _))| keep * x + delta * atom.entry(i, j))
            .collect();
        if atom.scale != 0.0 && delta != 0.0 {
            atoms.push(Arc::clone(atom));
            weights.push(delta);
        }
        LowRankIterate {
            shape: self.shape,
            atoms,
            weights,
            observed,
        }
    }

    /// Row-major dense matrix.
    pub fn materialize(&self) -> Vec<f64> {
        let (m, n) = self.shape;
        let mut out = vec![0.0; m * n];
        for (w, a) in self.atoms() {
            let s = w * a.scale;
            for (i, p) in a.left.iter().enumerate() {
                let row = &mut out[i * n..(i + 1) * n];
                for (o, q) in row.iter_mut().zip(&a.right) {
                    *o += s * p * q;
                }
            }
        }
        out
    }

    /// Upper bound on the nuclear norm from the atom weights.
    pub fn nuclear_norm_bound(&self) -> f64 {
        self.atoms().map(|(w, a)| w * a.scale.abs()).sum()
    }

    /// Singular values of the iterate computed from its factors: with
    /// `X = P D Q^T`, the values are those of `R_p D R_q^T` for thin QR
    /// factors of `P` and `Q`.
    pub fn singular_values(&self) -> Vec<f64> {
        let k = self.atoms.len();
        if k == 0 {
            return Vec::new();
        }
        let (m, n) = self.shape;
        let p = DMatrix::from_fn(m, k, |i, t| self.atoms[t].left[i]);
        let q = DMatrix::from_fn(n, k, |j, t| self.atoms[t].right[j]);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            k,
            self.atoms().map(|(w, a)| w * a.scale),
        ));
        let rp = p.qr().r();
        let rq = q.qr().r();
        let core = rp * d * rq.transpose();
        let mut sv: Vec<f64> = core.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Number of singular values above `tol * sigma_1`.
    pub fn numerical_rank(&self, tol: f64) -> usize {
        let sv = self.singular_values();
        match sv.first() {
            Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > tol * top).count(),
            _ => 0,
        }
    }

    pub(crate) fn check_pattern(&self, shape: (usize, usize), len: usize) -> Result<()> {
        if shape != self.shape {
            return Err(Error::InvalidArgument(format!(
                "iterate shape {:?} does not match problem shape {shape:?}",
                self.shape
            )));
        }
        if len != self.observed.len() {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: self.observed.len(),
            });
        }
        Ok(())
    }
}

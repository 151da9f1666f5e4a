//! Linear minimization oracles: `argmin_{x in C} <g, x>` for every supported set.
//!
//! Ties are broken toward the lowest index and `sgn(0)` is taken as `+1`, so
//! repeated runs pick identical atoms. A (numerically) zero input yields
//! [`Error::ZeroGradient`]; solvers map that signal to a fallback atom.

use crate::error::{Error, Result};
use crate::linalg::{self, PowerIteration};
use crate::problem::{ConstraintSet, ObservedEntries, PatternOperator};

/// Inputs with magnitude below this are treated as zero.
pub const ZERO_GRADIENT_TOL: f64 = 1e-15;

/// `scale * left * right^T`, with unit `left` and `right`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank1Atom {
    pub scale: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl Rank1Atom {
    /// The zero matrix written as a rank-1 triple with zero scale.
    pub fn zero(rows: usize, cols: usize) -> Self {
        let mut left = vec![0.0; rows];
        let mut right = vec![0.0; cols];
        left[0] = 1.0;
        right[0] = 1.0;
        Rank1Atom {
            scale: 0.0,
            left,
            right,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.left.len(), self.right.len())
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.scale * self.left[i] * self.right[j]
    }

    /// Row-major dense matrix.
    pub fn materialize(&self) -> Vec<f64> {
        self.left
            .iter()
            .flat_map(|p| self.right.iter().map(move |q| self.scale * p * q))
            .collect()
    }
}

/// An extreme point returned by an LMO.
#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    Dense(Vec<f64>),
    Rank1(Rank1Atom),
}

impl Atom {
    pub fn materialize(&self) -> Vec<f64> {
        match self {
            Atom::Dense(v) => v.clone(),
            Atom::Rank1(a) => a.materialize(),
        }
    }
}

fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// `-(radius / ||g||) g`. Shared by the l2 and n-support oracles so that the
/// `n = d` case is bit-identical to the l2 ball.
fn scaled_negative(g: &[f64], radius: f64) -> Result<Vec<f64>> {
    let norm = linalg::norm2(g);
    if norm < ZERO_GRADIENT_TOL {
        return Err(Error::ZeroGradient);
    }
    let factor = radius / norm;
    Ok(g.iter().map(|x| -factor * x).collect())
}

pub fn lmo_l2(g: &[f64], radius: f64) -> Result<Vec<f64>> {
    scaled_negative(g, radius)
}

pub fn lmo_l1(g: &[f64], radius: f64) -> Result<Vec<f64>> {
    let mut best = 0;
    for (j, x) in g.iter().enumerate() {
        if x.abs() > g[best].abs() {
            best = j;
        }
    }
    if g.is_empty() || g[best].abs() < ZERO_GRADIENT_TOL {
        return Err(Error::ZeroGradient);
    }
    let mut v = vec![0.0; g.len()];
    v[best] = -sgn(g[best]) * radius;
    Ok(v)
}

pub fn lmo_simplex(g: &[f64], mass: f64) -> Result<Vec<f64>> {
    if g.is_empty() {
        return Err(Error::InvalidArgument("empty gradient".into()));
    }
    let mut best = 0;
    for (j, x) in g.iter().enumerate() {
        if *x < g[best] {
            best = j;
        }
    }
    let mut v = vec![0.0; g.len()];
    v[best] = mass;
    Ok(v)
}

/// Indices of the `n` largest-magnitude entries, lowest index first among ties.
pub fn top_n_indices(g: &[f64], n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..g.len()).collect();
    idx.sort_by(|&a, &b| g[b].abs().total_cmp(&g[a].abs()).then(a.cmp(&b)));
    idx.truncate(n);
    idx
}

pub fn lmo_nsupport(g: &[f64], n: usize, radius: f64) -> Result<Vec<f64>> {
    if n == 0 || n > g.len() {
        return Err(Error::InvalidArgument(format!(
            "n-support sparsity {n} outside 1..={}",
            g.len()
        )));
    }
    let mut truncated = vec![0.0; g.len()];
    for i in top_n_indices(g, n) {
        truncated[i] = g[i];
    }
    scaled_negative(&truncated, radius)
}

/// Rank-1 atom `-radius * p q^T` from the top singular pair of the sparse
/// gradient.
pub fn lmo_nuclear(
    g: &ObservedEntries,
    radius: f64,
    opts: &PowerIteration,
) -> Result<Rank1Atom> {
    let values = g.values();
    nuclear_atom(g.shape(), g.entries(), &values, radius, opts)
}

pub(crate) fn nuclear_atom(
    shape: (usize, usize),
    pattern: &[(usize, usize, f64)],
    values: &[f64],
    radius: f64,
    opts: &PowerIteration,
) -> Result<Rank1Atom> {
    match nuclear_atom_estimate(shape, pattern, values, radius, opts)? {
        (atom, true) => Ok(atom),
        (_, false) => Err(Error::NoConvergence {
            iterations: opts.max_iters,
        }),
    }
}

/// Nuclear atom from the last power-iteration estimate, plus whether the
/// iteration met its stopping rule.
pub(crate) fn nuclear_atom_estimate(
    shape: (usize, usize),
    pattern: &[(usize, usize, f64)],
    values: &[f64],
    radius: f64,
    opts: &PowerIteration,
) -> Result<(Rank1Atom, bool)> {
    if values.iter().all(|v| v.abs() < ZERO_GRADIENT_TOL) {
        return Err(Error::ZeroGradient);
    }
    let op = PatternOperator {
        shape,
        pattern,
        values,
    };
    let (pair, converged) = linalg::power_iterate(&op, opts)?;
    Ok((
        Rank1Atom {
            scale: -radius,
            left: pair.left,
            right: pair.right,
        },
        converged,
    ))
}

/// LMO for any vector constraint set.
pub fn lmo(g: &[f64], c: &ConstraintSet) -> Result<Vec<f64>> {
    match *c {
        ConstraintSet::L2Ball { radius } => lmo_l2(g, radius),
        ConstraintSet::L1Ball { radius } => lmo_l1(g, radius),
        ConstraintSet::Simplex { mass } => lmo_simplex(g, mass),
        ConstraintSet::NSupportBall { sparsity, radius } => lmo_nsupport(g, sparsity, radius),
        ConstraintSet::NuclearBall { .. } => Err(Error::UnsupportedConstraint(c.name())),
    }
}

/// Reference oracle: enumerates every vertex of an l1 ball or simplex
/// (`d <= 20`) and keeps the first minimizer.
pub fn lmo_bruteforce(g: &[f64], c: &ConstraintSet) -> Result<Vec<f64>> {
    let d = g.len();
    if d == 0 || d > 20 {
        return Err(Error::InvalidArgument(format!("brute force needs 1 <= d <= 20, got {d}")));
    }
    let vertices: Vec<Vec<f64>> = match *c {
        ConstraintSet::L1Ball { radius } => (0..d)
            .flat_map(|i| {
                [radius, -radius].map(|s| {
                    let mut v = vec![0.0; d];
                    v[i] = s;
                    v
                })
            })
            .collect(),
        ConstraintSet::Simplex { mass } => (0..d)
            .map(|i| {
                let mut v = vec![0.0; d];
                v[i] = mass;
                v
            })
            .collect(),
        _ => return Err(Error::UnsupportedConstraint(c.name())),
    };
    let mut best = &vertices[0];
    let mut best_value = linalg::dot(g, best);
    for v in &vertices[1..] {
        let value = linalg::dot(g, v);
        if value < best_value {
            best = v;
            best_value = value;
        }
    }
    Ok(best.clone())
}

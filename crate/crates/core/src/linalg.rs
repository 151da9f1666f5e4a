//! Dense vector helpers and the power-iteration routine shared by the nuclear
//! LMO and the Lipschitz estimate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

/// `(1 - delta) * a + delta * b`, elementwise.
pub fn lerp(a: &[f64], b: &[f64], delta: f64) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (1.0 - delta) * x + delta * y)
        .collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// A matrix accessed only through products with vectors.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `out = A x`; `out` has length `nrows`.
    fn apply(&self, x: &[f64], out: &mut [f64]);
    /// `out = A^T y`; `out` has length `ncols`.
    fn apply_transpose(&self, y: &[f64], out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    /// Relative change of successive Rayleigh quotients that counts as converged.
    pub tol: f64,
    pub max_iters: usize,
    /// Seed of the Gaussian start vector.
    pub seed: u64,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration {
            tol: 1e-10,
            max_iters: 500,
            seed: 0x5eed_f00d,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularPair {
    pub value: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

/// Top singular triple of `op` by power iteration on `AᵀA`.
///
/// The right vector is normalized so that its first entry of non-negligible
/// magnitude is positive; the left vector follows.
pub fn top_singular_pair<A: LinearOperator + ?Sized>(
    op: &A,
    opts: &PowerIteration,
) -> Result<SingularPair> {
    match power_iterate(op, opts)? {
        (pair, true) => Ok(pair),
        (_, false) => Err(Error::NoConvergence {
            iterations: opts.max_iters,
        }),
    }
}

/// Like [`top_singular_pair`], but hands back the last estimate together with
/// whether the stopping rule was met inside the budget.
pub fn power_iterate<A: LinearOperator + ?Sized>(
    op: &A,
    opts: &PowerIteration,
) -> Result<(SingularPair, bool)> {
    let (m, n) = (op.nrows(), op.ncols());
    if m == 0 || n == 0 {
        return Err(Error::ZeroGradient);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut q: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let qn = norm2(&q);
    q.iter_mut().for_each(|x| *x /= qn);

    let mut u = vec![0.0; m];
    let mut w = vec![0.0; n];
    let mut previous = f64::NAN;
    let mut converged = false;
    for iter in 0..opts.max_iters {
        op.apply(&q, &mut u);
        let rayleigh = dot(&u, &u);
        op.apply_transpose(&u, &mut w);
        let wn = norm2(&w);
        if wn == 0.0 || !wn.is_finite() {
            // start vector orthogonal to the row space, or a zero operator
            if iter == 0 {
                return Err(Error::ZeroGradient);
            }
            break;
        }
        for (qi, wi) in q.iter_mut().zip(&w) {
            *qi = wi / wn;
        }
        if iter > 0 && (rayleigh - previous).abs() <= opts.tol * rayleigh {
            converged = true;
            break;
        }
        previous = rayleigh;
    }

    op.apply(&q, &mut u);
    let sigma = norm2(&u);
    if sigma == 0.0 {
        return Err(Error::ZeroGradient);
    }
    let mut left: Vec<f64> = u.iter().map(|x| x / sigma).collect();
    let mut right = q;
    if let Some(first) = right.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            right.iter_mut().for_each(|x| *x = -*x);
            left.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok((
        SingularPair {
            value: sigma,
            left,
            right,
        },
        converged,
    ))
}

//! Test-side reference computations, written independently of the library.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

/// Singular values of a row-major `m x n` matrix, largest first.
pub fn singular_values(m: usize, n: usize, data: &[f64]) -> Vec<f64> {
    let a = DMatrix::from_row_slice(m, n, data);
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `1/2 ||x - c||^2` and its gradient.
pub fn quadratic(c: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let r: Vec<f64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
    (0.5 * dot(&r, &r), r)
}

/// Dense logistic loss `(1/N) sum log(1 + exp(-b <a, x>))` evaluated naively.
pub fn logistic(rows: &[Vec<f64>], labels: &[f64], x: &[f64]) -> (f64, Vec<f64>) {
    let n = rows.len() as f64;
    let mut value = 0.0;
    let mut grad = vec![0.0; x.len()];
    for (a, b) in rows.iter().zip(labels) {
        let t = b * dot(a, x);
        value += (-t).exp().ln_1p();
        let w = -b / (1.0 + t.exp());
        for (g, aj) in grad.iter_mut().zip(a) {
            *g += w * aj / n;
        }
    }
    (value / n, grad)
}

/// A random point of the l2 ball of radius `r`.
pub fn in_l2(rng: &mut ChaCha8Rng, d: usize, r: f64) -> Vec<f64> {
    let x = gaussian(rng, d);
    let s = r * rng.random::<f64>() / norm2(&x);
    x.iter().map(|v| v * s).collect()
}

pub fn in_l1(rng: &mut ChaCha8Rng, d: usize, r: f64) -> Vec<f64> {
    let x = gaussian(rng, d);
    let s = r * rng.random::<f64>() / x.iter().map(|v| v.abs()).sum::<f64>();
    x.iter().map(|v| v * s).collect()
}

pub fn in_simplex(rng: &mut ChaCha8Rng, d: usize, mass: f64) -> Vec<f64> {
    let x: Vec<f64> = (0..d).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = x.iter().sum();
    x.iter().map(|v| mass * v / s).collect()
}

/// A convex combination of a few `n`-sparse vectors of norm at most `r`.
pub fn in_nsupport(rng: &mut ChaCha8Rng, d: usize, n: usize, r: f64) -> Vec<f64> {
    let parts = 1 + rng.random_range(0..4);
    let weights: Vec<f64> = in_simplex(rng, parts, 1.0);
    let mut x = vec![0.0; d];
    for w in weights {
        let mut idx: Vec<usize> = (0..d).collect();
        for i in 0..n {
            let j = rng.random_range(i..d);
            idx.swap(i, j);
        }
        let mut s = vec![0.0; d];
        for &i in &idx[..n] {
            s[i] = rng.sample(StandardNormal);
        }
        let scale = r * rng.random::<f64>() / norm2(&s).max(1e-300);
        for (xi, si) in x.iter_mut().zip(&s) {
            *xi += w * scale * si;
        }
    }
    x
}

/// A random matrix of nuclear norm at most `r`, as a sum of rank-1 terms.
pub fn in_nuclear(rng: &mut ChaCha8Rng, m: usize, n: usize, r: f64) -> Vec<f64> {
    let terms = 1 + rng.random_range(0..3);
    let total = rng.random::<f64>() * r;
    let weights = in_simplex(rng, terms, total);
    let mut x = vec![0.0; m * n];
    for w in weights {
        let p = gaussian(rng, m);
        let q = gaussian(rng, n);
        let s = w / (norm2(&p) * norm2(&q));
        for i in 0..m {
            for j in 0..n {
                x[i * n + j] += s * p[i] * q[j];
            }
        }
    }
    x
}

/// Central differences with `h = 1e-6` against an analytic gradient: 1e-4
/// relative, or 1e-7 absolute for components near zero.
pub fn check_gradient(f: impl Fn(&[f64]) -> (f64, Vec<f64>), x: &[f64]) -> Result<(), String> {
    const H: f64 = 1e-6;
    let (_, grad) = f(x);
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + H;
        let up = f(&probe).0;
        probe[i] = x[i] - H;
        let down = f(&probe).0;
        probe[i] = x[i];
        let fd = (up - down) / (2.0 * H);
        let err = (fd - grad[i]).abs();
        if err > 1e-7 && err > 1e-4 * grad[i].abs() {
            return Err(format!("component {i}: analytic {} vs fd {fd}", grad[i]));
        }
    }
    Ok(())
}

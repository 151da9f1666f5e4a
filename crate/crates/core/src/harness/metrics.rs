use crate::error::{Error, Result};
use crate::lowrank::LowRankIterate;
use crate::problem::SparseMatrix;

pub const SPARSITY_TOL: f64 = 1e-12;

/// Floor applied to non-positive gaps by [`slope_fit_clipped`].
pub const GAP_FLOOR: f64 = 1e-16;

/// Number of entries with `|x_i| > tol`.
pub fn sparsity(x: &[f64], tol: f64) -> usize {
    x.iter().filter(|v| v.abs() > tol).count()
}

pub fn numerical_rank(x: &LowRankIterate, tol: f64) -> usize {
    x.numerical_rank(tol)
}

/// Fraction of rows with `sgn(<a_i, x>) == b_i`, where `sgn(0) = +1`.
pub fn test_accuracy(features: &SparseMatrix, labels: &[f64], x: &[f64]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let hits = labels
        .iter()
        .enumerate()
        .filter(|&(i, &b)| {
            let pred = if features.row_dot(i, x) >= 0.0 { 1.0 } else { -1.0 };
            pred == b
        })
        .count();
    hits as f64 / labels.len() as f64
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn check_ks(ks: &[usize], gaps: &[f64]) -> Result<()> {
    if ks.len() != gaps.len() {
        return Err(Error::DimensionMismatch {
            expected: ks.len(),
            found: gaps.len(),
        });
    }
    let mut distinct = ks.to_vec();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InvalidArgument("slope fit needs two distinct k".into()));
    }
    if ks.contains(&0) {
        return Err(Error::InvalidArgument("slope fit needs k >= 1".into()));
    }
    Ok(())
}

/// Least-squares slope of `log gap` against `log k`.
pub fn slope_fit(ks: &[usize], gaps: &[f64]) -> Result<f64> {
    check_ks(ks, gaps)?;
    if let Some((&k, &value)) = ks.iter().zip(gaps).find(|(_, g)| !(**g > 0.0)) {
        return Err(Error::NonPositiveGap { k, value });
    }
    let pts: Vec<(f64, f64)> = ks.iter().zip(gaps).map(|(&k, &g)| ((k as f64).ln(), g.ln())).collect();
    Ok(least_squares_slope(&pts))
}

/// Like [`slope_fit`] but clips gaps at [`GAP_FLOOR`]; the flag reports
/// whether any value was clipped.
pub fn slope_fit_clipped(ks: &[usize], gaps: &[f64]) -> Result<(f64, bool)> {
    check_ks(ks, gaps)?;
    let clipped = gaps.iter().any(|g| !(*g > GAP_FLOOR));
    let floored: Vec<f64> = gaps.iter().map(|g| if *g > GAP_FLOOR { *g } else { GAP_FLOOR }).collect();
    Ok((slope_fit(ks, &floored)?, clipped))
}

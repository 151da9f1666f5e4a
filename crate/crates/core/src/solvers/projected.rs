//! Projected gradient baselines. Exact projections exist only for the l2
//! ball, l1 ball and simplex; other sets are rejected.

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{ConstraintSet, Objective};

pub fn project_l2(x: &[f64], radius: f64) -> Vec<f64> {
    let n = linalg::norm2(x);
    if n <= radius {
        x.to_vec()
    } else {
        x.iter().map(|v| v * radius / n).collect()
    }
}

/// Sorting-based projection onto `{x >= 0, sum(x) = mass}`.
pub fn project_simplex(x: &[f64], mass: f64) -> Vec<f64> {
    let mut u = x.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        cumsum += ui;
        let t = (cumsum - mass) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            theta = t;
        }
    }
    x.iter().map(|v| (v - theta).max(0.0)).collect()
}

/// Projection onto the l1 ball by soft-thresholding at the simplex threshold
/// of `|x|`.
pub fn project_l1(x: &[f64], radius: f64) -> Vec<f64> {
    if linalg::norm1(x) <= radius {
        return x.to_vec();
    }
    let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let w = project_simplex(&abs, radius);
    x.iter().zip(w).map(|(v, w)| v.signum() * w).collect()
}

pub fn project(x: &[f64], c: &ConstraintSet) -> Result<Vec<f64>> {
    c.check_dim(x.len())?;
    match *c {
        ConstraintSet::L2Ball { radius } => Ok(project_l2(x, radius)),
        ConstraintSet::L1Ball { radius } => Ok(project_l1(x, radius)),
        ConstraintSet::Simplex { mass } => Ok(project_simplex(x, mass)),
        _ => Err(Error::UnsupportedConstraint(c.name())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedState {
    pub k: usize,
    pub x: Vec<f64>,
    pub x_prev: Vec<f64>,
}

impl ProjectedState {
    pub fn new(x0: Vec<f64>) -> Self {
        ProjectedState {
            k: 0,
            x_prev: x0.clone(),
            x: x0,
        }
    }
}

fn check_step(c: &ConstraintSet, lipschitz: f64) -> Result<()> {
    if !(lipschitz.is_finite() && lipschitz > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gradient step needs a positive Lipschitz constant, got {lipschitz}"
        )));
    }
    match c {
        ConstraintSet::L2Ball { .. } | ConstraintSet::L1Ball { .. } | ConstraintSet::Simplex { .. } => {
            Ok(())
        }
        _ => Err(Error::UnsupportedConstraint(c.name())),
    }
}

fn gradient_step<O: Objective + ?Sized>(
    objective: &O,
    c: &ConstraintSet,
    lipschitz: f64,
    z: &[f64],
) -> Result<Vec<f64>> {
    let (_, grad) = objective.evaluate(z)?;
    if !linalg::all_finite(&grad) {
        return Err(Error::NonFinite("gradient"));
    }
    let moved: Vec<f64> = z.iter().zip(&grad).map(|(x, g)| x - g / lipschitz).collect();
    project(&moved, c)
}

/// `x_{k+1} = P(x_k - grad f(x_k) / L)`.
pub fn gd_step<O: Objective + ?Sized>(
    state: &mut ProjectedState,
    objective: &O,
    c: &ConstraintSet,
    lipschitz: f64,
) -> Result<()> {
    check_step(c, lipschitz)?;
    let next = gradient_step(objective, c, lipschitz, &state.x)?;
    state.x_prev = std::mem::replace(&mut state.x, next);
    state.k += 1;
    Ok(())
}

/// Momentum weight `(k-1)/(k+2)`, clamped at zero for the first step.
pub fn nag_momentum(k: usize) -> f64 {
    ((k as f64 - 1.0) / (k as f64 + 2.0)).max(0.0)
}

/// `z_k = x_k + beta_k (x_k - x_{k-1})`, `x_{k+1} = P(z_k - grad f(z_k) / L)`.
pub fn nag_step<O: Objective + ?Sized>(
    state: &mut ProjectedState,
    objective: &O,
    c: &ConstraintSet,
    lipschitz: f64,
) -> Result<()> {
    check_step(c, lipschitz)?;
    let beta = nag_momentum(state.k);
    let z: Vec<f64> = state
        .x
        .iter()
        .zip(&state.x_prev)
        .map(|(x, p)| x + beta * (x - p))
        .collect();
    let next = gradient_step(objective, c, lipschitz, &z)?;
    state.x_prev = std::mem::replace(&mut state.x, next);
    state.k += 1;
    Ok(())
}

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use super::Domain;
use crate::error::{Error, Result};
use crate::linalg::{self, PowerIteration};
use crate::lmo::{self, Rank1Atom};
use crate::lowrank::LowRankIterate;
use crate::oracles::CompletionProblem;
use crate::problem::{ConstraintSet, Objective};

/// A dense objective over one of the vector constraint sets.
pub struct VectorDomain<'a, O: Objective + ?Sized> {
    objective: &'a O,
    constraint: ConstraintSet,
}

impl<'a, O: Objective + ?Sized> VectorDomain<'a, O> {
    pub fn new(objective: &'a O, constraint: ConstraintSet) -> Result<Self> {
        if matches!(constraint, ConstraintSet::NuclearBall { .. }) {
            return Err(Error::UnsupportedConstraint(constraint.name()));
        }
        constraint.check_dim(objective.dim())?;
        Ok(VectorDomain {
            objective,
            constraint,
        })
    }

    pub fn objective(&self) -> &O {
        self.objective
    }

    pub fn constraint(&self) -> &ConstraintSet {
        &self.constraint
    }
}

impl<O: Objective + ?Sized> Domain for VectorDomain<'_, O> {
    type Point = Vec<f64>;
    type Grad = Vec<f64>;
    type Atom = Vec<f64>;

    fn evaluate(&self, x: &Vec<f64>) -> Result<(f64, Vec<f64>)> {
        let (value, grad) = self.objective.evaluate(x)?;
        if !value.is_finite() || !linalg::all_finite(&grad) {
            return Err(Error::NonFinite("objective evaluation"));
        }
        Ok((value, grad))
    }

    fn lmo(&self, g: &Vec<f64>) -> Result<Vec<f64>> {
        lmo::lmo(g, &self.constraint)
    }

    fn step(&self, x: &Vec<f64>, v: &Vec<f64>, delta: f64) -> Vec<f64> {
        linalg::lerp(x, v, delta)
    }

    fn average(&self, g: &Vec<f64>, fresh: &Vec<f64>, delta: f64) -> Vec<f64> {
        linalg::lerp(g, fresh, delta)
    }

    fn zero_grad(&self) -> Vec<f64> {
        vec![0.0; self.objective.dim()]
    }

    fn atom_at(&self, x: &Vec<f64>) -> Result<Vec<f64>> {
        if x.len() != self.objective.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.objective.dim(),
                found: x.len(),
            });
        }
        Ok(x.clone())
    }

    fn pair_point(&self, g: &Vec<f64>, x: &Vec<f64>) -> f64 {
        linalg::dot(g, x)
    }

    fn pair_atom(&self, g: &Vec<f64>, v: &Vec<f64>) -> f64 {
        linalg::dot(g, v)
    }
}

/// Matrix completion over a nuclear-norm ball with factored iterates.
pub struct CompletionDomain<'a> {
    problem: &'a CompletionProblem,
    radius: f64,
    power: PowerIteration,
    inexact: AtomicUsize,
}

/// Extra power-iteration attempts from a fresh start with a 10x budget. When
/// the last one still misses the tolerance its estimate is used and counted as
/// inexact; near an optimum the gradient's top singular values tie and any
/// vector in that subspace is a valid answer.
const POWER_RETRIES: usize = 1;

impl<'a> CompletionDomain<'a> {
    pub fn new(problem: &'a CompletionProblem, constraint: ConstraintSet) -> Result<Self> {
        match constraint {
            ConstraintSet::NuclearBall { rows, cols, radius } => {
                if (rows, cols) != problem.shape() {
                    return Err(Error::InvalidArgument(format!(
                        "nuclear ball shape ({rows}, {cols}) does not match data {:?}",
                        problem.shape()
                    )));
                }
                Ok(CompletionDomain {
                    problem,
                    radius,
                    power: PowerIteration::default(),
                    inexact: AtomicUsize::new(0),
                })
            }
            other => Err(Error::UnsupportedConstraint(other.name())),
        }
    }

    pub fn with_power_iteration(mut self, power: PowerIteration) -> Self {
        self.power = power;
        self
    }

    pub fn problem(&self) -> &CompletionProblem {
        self.problem
    }

    /// LMO calls answered with a power-iteration estimate that missed the tolerance.
    pub fn inexact_lmos(&self) -> usize {
        self.inexact.load(Ordering::Relaxed)
    }

    pub fn zero_point(&self) -> LowRankIterate {
        LowRankIterate::zero(self.problem.shape(), self.problem.observed().len())
    }

    fn pattern(&self) -> &[(usize, usize, f64)] {
        self.problem.observed().entries()
    }
}

impl Domain for CompletionDomain<'_> {
    type Point = LowRankIterate;
    type Grad = Vec<f64>;
    type Atom = Arc<Rank1Atom>;

    fn evaluate(&self, x: &LowRankIterate) -> Result<(f64, Vec<f64>)> {
        x.check_pattern(self.problem.shape(), self.pattern().len())?;
        let (value, grad) = self.problem.evaluate_observed(x.observed_values())?;
        if !value.is_finite() || !linalg::all_finite(&grad) {
            return Err(Error::NonFinite("objective evaluation"));
        }
        Ok((value, grad))
    }

    fn lmo(&self, g: &Vec<f64>) -> Result<Arc<Rank1Atom>> {
        let mut opts = self.power;
        let mut attempt = 0;
        loop {
            let (atom, converged) = lmo::nuclear_atom_estimate(
                self.problem.shape(),
                self.pattern(),
                g,
                self.radius,
                &opts,
            )?;
            if converged {
                return Ok(Arc::new(atom));
            }
            if attempt == POWER_RETRIES {
                self.inexact.fetch_add(1, Ordering::Relaxed);
                return Ok(Arc::new(atom));
            }
            attempt += 1;
            opts.seed = opts.seed.wrapping_add(attempt as u64);
            opts.max_iters *= 10;
        }
    }

    fn step(&self, x: &LowRankIterate, v: &Arc<Rank1Atom>, delta: f64) -> LowRankIterate {
        x.combine(v, delta, self.pattern())
    }

    fn average(&self, g: &Vec<f64>, fresh: &Vec<f64>, delta: f64) -> Vec<f64> {
        linalg::lerp(g, fresh, delta)
    }

    fn zero_grad(&self) -> Vec<f64> {
        vec![0.0; self.pattern().len()]
    }

    fn atom_at(&self, x: &LowRankIterate) -> Result<Arc<Rank1Atom>> {
        let (m, n) = self.problem.shape();
        let mut atoms = x.atoms();
        match (atoms.next(), atoms.next()) {
            (None, _) => Ok(Arc::new(Rank1Atom::zero(m, n))),
            (Some((w, a)), None) if w == 1.0 => Ok(Arc::new(a.clone())),
            _ => Err(Error::InvalidArgument(
                "matrix starting point must be zero or a single atom".into(),
            )),
        }
    }

    fn pair_point(&self, g: &Vec<f64>, x: &LowRankIterate) -> f64 {
        linalg::dot(g, x.observed_values())
    }

    fn pair_atom(&self, g: &Vec<f64>, v: &Arc<Rank1Atom>) -> f64 {
        self.pattern()
            .iter()
            .zip(g)
            .map(|(&(i, j, _), gv)| gv * v.entry(i, j))
            .sum()
    }
}

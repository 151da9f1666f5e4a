//! Iterative solvers as explicit step functions.
//!
//! The Frank-Wolfe family (FW, AFW, ExtraFW) is written once against the
//! [`Domain`] trait so the same code drives dense-vector problems and the
//! factored matrix-completion iterate. Projected GD and NAG work on dense
//! vectors only and live in [`projected`].

mod domains;
mod driver;
mod frank_wolfe;
pub mod projected;

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use domains::{CompletionDomain, VectorDomain};
pub use driver::{run, run_frank_wolfe, run_projected, IterationRecord, RunOptions, RunOutcome};
pub use frank_wolfe::{afw_step, extrafw_step, fw_step};
pub use projected::{gd_step, nag_step, project, ProjectedState};

/// A problem seen through its oracles: first-order evaluation, LMO and the
/// convex-combination geometry of its iterates.
pub trait Domain {
    type Point: Clone;
    type Grad: Clone;
    type Atom: Clone;

    fn evaluate(&self, x: &Self::Point) -> Result<(f64, Self::Grad)>;

    /// Returns [`Error::ZeroGradient`](crate::Error::ZeroGradient) for a zero input.
    fn lmo(&self, g: &Self::Grad) -> Result<Self::Atom>;

    /// `(1 - delta) x + delta v`.
    fn step(&self, x: &Self::Point, v: &Self::Atom, delta: f64) -> Self::Point;

    /// `(1 - delta) g + delta fresh`.
    fn average(&self, g: &Self::Grad, fresh: &Self::Grad, delta: f64) -> Self::Grad;

    fn zero_grad(&self) -> Self::Grad;

    /// The starting point as an atom (`v_0 = x_0`).
    fn atom_at(&self, x: &Self::Point) -> Result<Self::Atom>;

    fn pair_point(&self, g: &Self::Grad, x: &Self::Point) -> f64;

    fn pair_atom(&self, g: &Self::Grad, v: &Self::Atom) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Fw,
    Afw,
    #[serde(rename = "extrafw")]
    ExtraFw,
    Gd,
    Nag,
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Solver::Fw => "fw",
            Solver::Afw => "afw",
            Solver::ExtraFw => "extrafw",
            Solver::Gd => "gd",
            Solver::Nag => "nag",
        }
    }

    pub fn is_frank_wolfe(&self) -> bool {
        matches!(self, Solver::Fw | Solver::Afw | Solver::ExtraFw)
    }

    pub fn parse(s: &str) -> Option<Solver> {
        [Solver::Fw, Solver::Afw, Solver::ExtraFw, Solver::Gd, Solver::Nag]
            .into_iter()
            .find(|v| v.name() == s)
    }
}

/// Open-loop step sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepSchedule {
    /// `2 / (k + 2)`
    Classic,
    /// `2 / (k + 3)`, used by AFW and ExtraFW
    Shifted,
}

impl StepSchedule {
    pub fn delta(&self, k: usize) -> f64 {
        match self {
            StepSchedule::Classic => 2.0 / (k as f64 + 2.0),
            StepSchedule::Shifted => 2.0 / (k as f64 + 3.0),
        }
    }
}

/// Iterate, running gradient average and last atom of a Frank-Wolfe-type run.
pub struct SolverState<D: Domain + ?Sized> {
    pub k: usize,
    pub x: D::Point,
    pub g: D::Grad,
    pub v: D::Atom,
}

impl<D: Domain + ?Sized> SolverState<D> {
    /// `g_0 = 0`, `v_0 = x_0`.
    pub fn new(domain: &D, x0: D::Point) -> Result<Self> {
        Ok(SolverState {
            k: 0,
            g: domain.zero_grad(),
            v: domain.atom_at(&x0)?,
            x: x0,
        })
    }
}

impl<D: Domain + ?Sized> Clone for SolverState<D> {
    fn clone(&self) -> Self {
        SolverState {
            k: self.k,
            x: self.x.clone(),
            g: self.g.clone(),
            v: self.v.clone(),
        }
    }
}

/// Per-step byproducts used for certificates and monitoring.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepReport {
    pub delta: f64,
    /// FW duality gap `<grad f(x_k), x_k - v_{k+1}>` of the pre-step iterate.
    pub duality_gap: Option<f64>,
    /// `f(z) - <grad f(z), z>` at the point whose gradient entered `g_{k+1}`.
    pub linearization_offset: Option<f64>,
    /// `<g_{k+1}, v_{k+1}>`.
    pub g_dot_v: Option<f64>,
    /// `f(x_k)` when the step evaluated it anyway.
    pub value_at_current: Option<f64>,
    /// `f(x_{k+1})` when the step evaluated it anyway.
    pub value_at_next: Option<f64>,
}

/// Wraps a domain and counts oracle calls.
pub struct Counting<'a, D: ?Sized> {
    inner: &'a D,
    fo_calls: Cell<usize>,
    lmo_calls: Cell<usize>,
}

impl<'a, D: Domain + ?Sized> Counting<'a, D> {
    pub fn new(inner: &'a D) -> Self {
        Counting {
            inner,
            fo_calls: Cell::new(0),
            lmo_calls: Cell::new(0),
        }
    }

    pub fn fo_calls(&self) -> usize {
        self.fo_calls.get()
    }

    pub fn lmo_calls(&self) -> usize {
        self.lmo_calls.get()
    }

    pub fn inner(&self) -> &D {
        self.inner
    }
}

impl<D: Domain + ?Sized> Domain for Counting<'_, D> {
    type Point = D::Point;
    type Grad = D::Grad;
    type Atom = D::Atom;

    fn evaluate(&self, x: &Self::Point) -> Result<(f64, Self::Grad)> {
        self.fo_calls.set(self.fo_calls.get() + 1);
        self.inner.evaluate(x)
    }

    fn lmo(&self, g: &Self::Grad) -> Result<Self::Atom> {
        self.lmo_calls.set(self.lmo_calls.get() + 1);
        self.inner.lmo(g)
    }

    fn step(&self, x: &Self::Point, v: &Self::Atom, delta: f64) -> Self::Point {
        self.inner.step(x, v, delta)
    }

    fn average(&self, g: &Self::Grad, fresh: &Self::Grad, delta: f64) -> Self::Grad {
        self.inner.average(g, fresh, delta)
    }

    fn zero_grad(&self) -> Self::Grad {
        self.inner.zero_grad()
    }

    fn atom_at(&self, x: &Self::Point) -> Result<Self::Atom> {
        self.inner.atom_at(x)
    }

    fn pair_point(&self, g: &Self::Grad, x: &Self::Point) -> f64 {
        self.inner.pair_point(g, x)
    }

    fn pair_atom(&self, g: &Self::Grad, v: &Self::Atom) -> f64 {
        self.inner.pair_atom(g, v)
    }
}

//! Projection-free convex optimization: Frank-Wolfe, averaged Frank-Wolfe
//! and ExtraFW over structured constraint sets, with projected GD and NAG
//! baselines, computable certificates and an experiment harness.

pub mod certificates;
pub mod data_io;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod lmo;
pub mod lowrank;
pub mod oracles;
pub mod problem;
pub mod solvers;

pub use certificates::{Certificate, XiSequence};
pub use error::{Error, Result};
pub use lmo::{Atom, Rank1Atom};
pub use lowrank::LowRankIterate;
pub use oracles::{CompletionProblem, LogisticProblem, QuadraticProblem};
pub use problem::{ConstraintSet, ObservedEntries, Objective, SparseMatrix};
pub use solvers::{RunOptions, RunOutcome, Solver};

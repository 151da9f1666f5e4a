//! TOML experiment configuration.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solvers::Solver;

/// Environment variable naming the root directory for relative data paths.
pub const DATA_DIR_ENV: &str = "EXTRAFW_DATA_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Logistic,
    Completion,
    Quadratic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    SynthLogistic {
        samples: usize,
        dim: usize,
        /// Nonzeros of the planted weight vector.
        sparsity: usize,
        margin: f64,
    },
    Libsvm {
        path: PathBuf,
        /// Class mapped to `+1`; labels must already be `+-1` when absent.
        positive_class: Option<f64>,
        dim: Option<usize>,
        #[serde(default)]
        normalize: bool,
    },
    SynthLowrank {
        rows: usize,
        cols: usize,
        rank: usize,
        density: f64,
        noise: f64,
    },
    Movielens {
        path: PathBuf,
        rows: usize,
        cols: usize,
    },
    Quadratic {
        dim: usize,
        /// Defaults to `(2, 0, ..., 0)`.
        center: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    L2,
    L1,
    Simplex,
    Nsupport,
    Nuclear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub kind: ConstraintKind,
    /// Radius, or total mass for the simplex.
    pub radius: Option<f64>,
    /// Synthetic completion only: radius as a multiple of the ground truth's
    /// nuclear norm.
    pub radius_scale: Option<f64>,
    /// n-support ball only.
    pub sparsity: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StartPolicy {
    /// The origin, or `R e_1` on the simplex.
    #[default]
    Default,
    /// The origin; rejected for the simplex.
    Zero,
}

fn default_rank_every() -> usize {
    25
}

fn default_rank_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: Option<String>,
    pub task: Task,
    pub seed: u64,
    pub iterations: usize,
    pub solvers: Vec<Solver>,
    pub output: PathBuf,
    /// Stop a solver once its certificate falls to this value.
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub start: StartPolicy,
    /// Training fraction for a shuffled train/test split (logistic only).
    pub train_fraction: Option<f64>,
    /// Step constant for GD and NAG; estimated from the data when absent.
    pub lipschitz: Option<f64>,
    /// Adds a per-iteration wall-clock column and run times in the summary.
    /// Traces are then no longer byte-reproducible.
    #[serde(default)]
    pub record_time: bool,
    /// Numerical rank of completion iterates is computed every this many
    /// iterations (and at the last one).
    #[serde(default = "default_rank_every")]
    pub rank_every: usize,
    /// Relative singular-value threshold for the numerical rank.
    #[serde(default = "default_rank_tol")]
    pub rank_tol: f64,
    pub data: DataSpec,
    pub constraint: ConstraintSpec,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(config_err("iterations must be at least 1"));
        }
        if let Some(eps) = self.tolerance {
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(config_err(format!("tolerance must be positive, got {eps}")));
            }
        }
        if self.solvers.is_empty() {
            return Err(config_err("no solvers listed"));
        }
        let mut seen = HashSet::new();
        for s in &self.solvers {
            if !seen.insert(s) {
                return Err(config_err(format!("solver {} listed twice", s.name())));
            }
        }
        if self.rank_every == 0 {
            return Err(config_err("rank_every must be at least 1"));
        }
        if let Some(l) = self.lipschitz {
            if !(l > 0.0 && l.is_finite()) {
                return Err(config_err(format!("lipschitz must be positive, got {l}")));
            }
        }

        let data_task = match self.data {
            DataSpec::SynthLogistic { .. } | DataSpec::Libsvm { .. } => Task::Logistic,
            DataSpec::SynthLowrank { .. } | DataSpec::Movielens { .. } => Task::Completion,
            DataSpec::Quadratic { .. } => Task::Quadratic,
        };
        if data_task != self.task {
            return Err(config_err(format!(
                "data source does not belong to task {:?}",
                self.task
            )));
        }
        if let Some(f) = self.train_fraction {
            if self.task != Task::Logistic {
                return Err(config_err("train_fraction applies to logistic tasks only"));
            }
            if !(f > 0.0 && f < 1.0) {
                return Err(config_err(format!("train_fraction must lie in (0, 1), got {f}")));
            }
        }

        let c = &self.constraint;
        let nuclear = c.kind == ConstraintKind::Nuclear;
        if nuclear != (self.task == Task::Completion) {
            return Err(config_err("the nuclear ball goes with the completion task and only it"));
        }
        match (c.radius, c.radius_scale) {
            (Some(r), None) if r > 0.0 && r.is_finite() => {}
            (None, Some(s)) if s > 0.0 && s.is_finite() => {
                if !matches!(self.data, DataSpec::SynthLowrank { .. }) {
                    return Err(config_err("radius_scale needs synthetic low-rank data"));
                }
            }
            (Some(_), Some(_)) => return Err(config_err("give either radius or radius_scale")),
            (None, None) => return Err(config_err("constraint radius missing")),
            _ => return Err(config_err("constraint radius must be positive")),
        }
        match (c.kind, c.sparsity) {
            (ConstraintKind::Nsupport, None) => {
                return Err(config_err("n-support ball needs a sparsity"))
            }
            (ConstraintKind::Nsupport, Some(0)) => {
                return Err(config_err("n-support sparsity must be at least 1"))
            }
            (ConstraintKind::Nsupport, Some(_)) => {}
            (_, Some(_)) => return Err(config_err("sparsity applies to the n-support ball only")),
            _ => {}
        }
        if c.kind == ConstraintKind::Simplex && self.start == StartPolicy::Zero {
            return Err(config_err("the origin is not on the simplex"));
        }
        for s in &self.solvers {
            if !s.is_frank_wolfe()
                && matches!(c.kind, ConstraintKind::Nsupport | ConstraintKind::Nuclear)
            {
                return Err(config_err(format!(
                    "{} needs a projection, which is not available for this constraint",
                    s.name()
                )));
            }
        }
        Ok(())
    }

    /// Resolves a data path: absolute paths are kept, relative ones are taken
    /// from the data root if set, else from `base` (the config's directory).
    pub fn resolve_data_path(path: &Path, base: &Path) -> PathBuf {
        if path.is_absolute() {
            return path.to_path_buf();
        }
        match std::env::var_os(DATA_DIR_ENV) {
            Some(root) => PathBuf::from(root).join(path),
            None => base.join(path),
        }
    }
}

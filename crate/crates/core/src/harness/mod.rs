//! Experiment runner: builds a problem from a config, runs every listed
//! solver over shared read-only data and writes one trace per solver plus a
//! summary.

pub mod config;
pub mod metrics;
pub mod trace;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub use config::{
    ConstraintKind, ConstraintSpec, DataSpec, ExperimentConfig, StartPolicy, Task, DATA_DIR_ENV,
};
pub use metrics::{numerical_rank, slope_fit, slope_fit_clipped, sparsity, test_accuracy};
pub use trace::{read_trace, write_trace, ReferenceSource, SolverSummary, Summary, TraceRow};

use crate::data_io::{self, Dataset};
use crate::error::{Error, Result};
use crate::lowrank::LowRankIterate;
use crate::oracles::{estimate_lipschitz, CompletionProblem, LogisticProblem, QuadraticProblem};
use crate::problem::{ConstraintSet, Objective, SparseMatrix};
use crate::solvers::{self, CompletionDomain, IterationRecord, RunOptions, Solver};

/// Optimality values below this are reported as warnings.
const OPTIMALITY_SLACK: f64 = 1e-9;

enum Prepared {
    Vector {
        objective: Box<dyn Objective>,
        constraint: ConstraintSet,
        test: Option<(SparseMatrix, Vec<f64>)>,
        lipschitz: Option<f64>,
        reference: Option<f64>,
    },
    Completion {
        problem: CompletionProblem,
        constraint: ConstraintSet,
    },
}

struct Setup {
    problem: Prepared,
    dataset_hash: Option<String>,
}

struct SolverRun {
    records: Vec<IterationRecord>,
    extras: Vec<Extras>,
    fo_calls: usize,
    lmo_calls: usize,
    stopped_at: Option<usize>,
    inexact_lmos: usize,
}

#[derive(Default, Clone, Copy)]
struct Extras {
    nnz: Option<usize>,
    atoms: Option<usize>,
    rank: Option<usize>,
    test_accuracy: Option<f64>,
}

/// Traces and summary of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub traces: BTreeMap<String, Vec<TraceRow>>,
    pub summary: Summary,
}

fn logistic_dataset(spec: &DataSpec, seed: u64, base: &Path) -> Result<Dataset> {
    match spec {
        DataSpec::SynthLogistic {
            samples,
            dim,
            sparsity,
            margin,
        } => Ok(data_io::synth_logistic(seed, *samples, *dim, *sparsity, *margin)?.dataset),
        DataSpec::Libsvm {
            path,
            positive_class,
            dim,
            normalize,
        } => {
            let path = ExperimentConfig::resolve_data_path(path, base);
            let mut ds = data_io::read_libsvm(&path, *dim)?;
            if let Some(p) = positive_class {
                ds = data_io::map_labels(ds, *p)?;
            }
            if *normalize {
                ds.features.normalize_max_abs();
            }
            Ok(ds)
        }
        _ => unreachable!("validated task"),
    }
}

fn build_constraint(spec: &ConstraintSpec, radius: f64, dim: usize) -> Result<ConstraintSet> {
    match spec.kind {
        ConstraintKind::L2 => ConstraintSet::l2(radius),
        ConstraintKind::L1 => ConstraintSet::l1(radius),
        ConstraintKind::Simplex => ConstraintSet::simplex(radius),
        ConstraintKind::Nsupport => {
            let n = spec.sparsity.expect("validated");
            if n > dim {
                return Err(Error::Config(format!(
                    "n-support sparsity {n} exceeds dimension {dim}"
                )));
            }
            ConstraintSet::n_support(n, radius)
        }
        ConstraintKind::Nuclear => unreachable!("built with its shape"),
    }
}

fn prepare(cfg: &ExperimentConfig, base: &Path) -> Result<Setup> {
    let radius = cfg.constraint.radius;
    match cfg.task {
        Task::Quadratic => {
            let DataSpec::Quadratic { dim, center } = &cfg.data else {
                unreachable!("validated task")
            };
            let center = match center {
                Some(c) if c.len() != *dim => {
                    return Err(Error::Config(format!(
                        "center has {} entries, dim is {dim}",
                        c.len()
                    )))
                }
                Some(c) => c.clone(),
                None => {
                    let mut c = vec![0.0; *dim];
                    c[0] = 2.0;
                    c
                }
            };
            let q = QuadraticProblem::new(center)?;
            let constraint = build_constraint(&cfg.constraint, radius.expect("validated"), *dim)?;
            let reference = match constraint {
                ConstraintSet::L2Ball { radius } => q.argmin_l2(radius).ok().map(|(_, f)| f),
                _ => None,
            };
            Ok(Setup {
                problem: Prepared::Vector {
                    objective: Box::new(q),
                    constraint,
                    test: None,
                    lipschitz: cfg.lipschitz,
                    reference,
                },
                dataset_hash: None,
            })
        }
        Task::Logistic => {
            let mut ds = logistic_dataset(&cfg.data, cfg.seed, base)?;
            if let Some(f) = cfg.train_fraction {
                ds = data_io::train_test_split(ds, f, cfg.seed)?;
            }
            let hash = ds.content_hash();
            let (features, labels) = ds.train();
            let problem = LogisticProblem::new(features, labels)?;
            let lipschitz = if cfg.solvers.iter().any(|s| !s.is_frank_wolfe()) {
                let l = cfg.lipschitz.unwrap_or_else(|| estimate_lipschitz(&problem));
                if !(l > 0.0 && l.is_finite()) {
                    return Err(Error::Config(format!(
                        "estimated Lipschitz constant {l} gives no usable gradient step"
                    )));
                }
                Some(l)
            } else {
                None
            };
            let constraint =
                build_constraint(&cfg.constraint, radius.expect("validated"), problem.dim())?;
            Ok(Setup {
                problem: Prepared::Vector {
                    objective: Box::new(problem),
                    constraint,
                    test: ds.test(),
                    lipschitz,
                    reference: None,
                },
                dataset_hash: Some(hash),
            })
        }
        Task::Completion => {
            let (observed, radius) = match &cfg.data {
                DataSpec::SynthLowrank {
                    rows,
                    cols,
                    rank,
                    density,
                    noise,
                } => {
                    let s = data_io::synth_lowrank(cfg.seed, *rows, *cols, *rank, *density, *noise)?;
                    let r = match (radius, cfg.constraint.radius_scale) {
                        (Some(r), _) => r,
                        (None, Some(scale)) => scale * s.ground_truth_nuclear_norm(),
                        (None, None) => unreachable!("validated radius"),
                    };
                    (s.observed, r)
                }
                DataSpec::Movielens { path, rows, cols } => {
                    let path = ExperimentConfig::resolve_data_path(path, base);
                    (data_io::read_movielens(&path, (*rows, *cols))?, radius.expect("validated"))
                }
                _ => unreachable!("validated task"),
            };
            let (m, n) = observed.shape();
            let hash = data_io::observed_hash(&observed);
            Ok(Setup {
                problem: Prepared::Completion {
                    problem: CompletionProblem::new(observed)?,
                    constraint: ConstraintSet::nuclear(m, n, radius)?,
                },
                dataset_hash: Some(hash),
            })
        }
    }
}

fn run_vector(
    cfg: &ExperimentConfig,
    solver: Solver,
    objective: &dyn Objective,
    constraint: &ConstraintSet,
    test: Option<&(SparseMatrix, Vec<f64>)>,
    lipschitz: Option<f64>,
) -> Result<SolverRun> {
    let dim = objective.dim();
    let x0 = match cfg.start {
        StartPolicy::Default => constraint.default_start(dim),
        StartPolicy::Zero => vec![0.0; dim],
    };
    let opts = RunOptions {
        iterations: cfg.iterations,
        tolerance: cfg.tolerance,
    };
    let mut extras = Vec::with_capacity(cfg.iterations + 1);
    let out = solvers::run(solver, objective, constraint, x0, lipschitz, &opts, |_, x| {
        extras.push(Extras {
            nnz: Some(sparsity(x, metrics::SPARSITY_TOL)),
            test_accuracy: test.map(|(a, b)| test_accuracy(a, b, x)),
            ..Extras::default()
        });
        Ok(())
    })?;
    Ok(SolverRun {
        records: out.records,
        extras,
        fo_calls: out.fo_calls,
        lmo_calls: out.lmo_calls,
        stopped_at: out.stopped_at,
        inexact_lmos: 0,
    })
}

fn run_completion(
    cfg: &ExperimentConfig,
    solver: Solver,
    problem: &CompletionProblem,
    constraint: &ConstraintSet,
) -> Result<SolverRun> {
    let domain = CompletionDomain::new(problem, *constraint)?;
    let x0 = LowRankIterate::zero(problem.shape(), problem.observed().len());
    let opts = RunOptions {
        iterations: cfg.iterations,
        tolerance: cfg.tolerance,
    };
    let mut extras = Vec::with_capacity(cfg.iterations + 1);
    let out = solvers::run_frank_wolfe(solver, &domain, x0, &opts, |rec, x| {
        let rank = (rec.k % cfg.rank_every == 0 || rec.k == cfg.iterations)
            .then(|| numerical_rank(x, cfg.rank_tol));
        extras.push(Extras {
            atoms: Some(x.atom_count()),
            rank,
            ..Extras::default()
        });
        Ok(())
    })?;
    if let Some(last) = extras.last_mut() {
        last.rank = Some(numerical_rank(&out.final_point, cfg.rank_tol));
    }
    Ok(SolverRun {
        records: out.records,
        extras,
        fo_calls: out.fo_calls,
        lmo_calls: out.lmo_calls,
        stopped_at: out.stopped_at,
        inexact_lmos: domain.inexact_lmos(),
    })
}

fn run_one(cfg: &ExperimentConfig, prepared: &Prepared, solver: Solver) -> Result<SolverRun> {
    match prepared {
        Prepared::Vector {
            objective,
            constraint,
            test,
            lipschitz,
            ..
        } => run_vector(cfg, solver, objective.as_ref(), constraint, test.as_ref(), *lipschitz),
        Prepared::Completion {
            problem,
            constraint,
        } => run_completion(cfg, solver, problem, constraint),
    }
}

/// Runs every solver of `cfg`. Relative data paths resolve against the data
/// root or `base`. Solvers run on separate threads unless `sequential`.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    base: &Path,
    sequential: bool,
) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let prepared = prepare(cfg, base)?;
    let runs: Vec<Result<SolverRun>> = if sequential {
        cfg.solvers
            .iter()
            .map(|&s| run_one(cfg, &prepared.problem, s))
            .collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = cfg
                .solvers
                .iter()
                .map(|&s| {
                    let p = &prepared.problem;
                    scope.spawn(move || run_one(cfg, p, s))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("solver thread panicked"))
                .collect()
        })
    };
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;

    let (constraint, analytic) = match &prepared.problem {
        Prepared::Vector {
            constraint,
            reference,
            ..
        } => (*constraint, *reference),
        Prepared::Completion { constraint, .. } => (*constraint, None),
    };
    let (f_ref, f_ref_source) = match analytic {
        Some(f) => (f, ReferenceSource::Analytic),
        None => {
            let best = runs
                .iter()
                .flat_map(|r| r.records.iter().map(|rec| rec.objective))
                .fold(f64::INFINITY, f64::min);
            (best, ReferenceSource::BestFound)
        }
    };

    let mut traces = BTreeMap::new();
    let mut solver_summaries = BTreeMap::new();
    let mut warnings = Vec::new();
    for (&solver, run) in cfg.solvers.iter().zip(&runs) {
        let rows: Vec<TraceRow> = run
            .records
            .iter()
            .zip(&run.extras)
            .map(|(rec, ex)| TraceRow {
                k: rec.k,
                objective: rec.objective,
                optimality: rec.objective - f_ref,
                certificate: rec.certificate,
                certificate_min: rec.certificate_min,
                phi_star: rec.phi_star,
                nnz: ex.nnz,
                atoms: ex.atoms,
                rank: ex.rank,
                test_accuracy: ex.test_accuracy,
                wall_ns: cfg.record_time.then_some(rec.wall_nanos),
            })
            .collect();
        if let Some(row) = rows.iter().find(|r| r.optimality < -OPTIMALITY_SLACK) {
            warnings.push(format!(
                "{}: optimality {} below the reference at k = {}",
                solver.name(),
                row.optimality,
                row.k
            ));
        }
        let last = rows.last().expect("at least the start is recorded");
        let from = (last.k / 10).max(1);
        let window: Vec<&TraceRow> = rows.iter().filter(|r| r.k >= from).collect();
        let ks: Vec<usize> = window.iter().map(|r| r.k).collect();
        let gaps: Vec<f64> = window.iter().map(|r| r.optimality).collect();
        let (slope, slope_clipped) = match slope_fit_clipped(&ks, &gaps) {
            Ok((s, c)) => (Some(s), c),
            Err(_) => (None, false),
        };
        if run.inexact_lmos > 0 {
            warnings.push(format!(
                "{}: {} LMO call(s) used a power-iteration estimate short of the tolerance",
                solver.name(),
                run.inexact_lmos
            ));
        }
        if slope_clipped {
            warnings.push(format!(
                "{}: non-positive optimality clipped at {:e} for the slope fit",
                solver.name(),
                metrics::GAP_FLOOR
            ));
        }
        solver_summaries.insert(
            solver.name().to_string(),
            SolverSummary {
                iterations: last.k,
                stopped_at: run.stopped_at,
                fo_calls: run.fo_calls,
                lmo_calls: run.lmo_calls,
                final_objective: last.objective,
                final_optimality: last.optimality,
                final_certificate: last.certificate,
                slope,
                slope_clipped,
                wall_seconds: cfg
                    .record_time
                    .then(|| run.records.last().map_or(0.0, |r| r.wall_nanos as f64 * 1e-9)),
            },
        );
        traces.insert(solver.name().to_string(), rows);
    }

    let summary = Summary {
        name: cfg.name.clone(),
        task: format!("{:?}", cfg.task).to_lowercase(),
        constraint: constraint.name().to_string(),
        radius: constraint.radius(),
        seed: cfg.seed,
        dataset_hash: prepared.dataset_hash,
        f_ref,
        f_ref_source,
        solvers: solver_summaries,
        warnings,
    };
    Ok(ExperimentOutput { traces, summary })
}

/// Writes `<dir>/<solver>.csv` and `<dir>/summary.json`.
pub fn write_outputs(dir: &Path, out: &ExperimentOutput) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    for (name, rows) in &out.traces {
        write_trace(&dir.join(format!("{name}.csv")), rows)?;
    }
    trace::write_summary(&dir.join("summary.json"), &out.summary)
}

/// Loads a config file, runs it and writes the outputs to `output` (or the
/// config's own output directory). Returns the directory written.
pub fn run_config_file(
    path: &Path,
    output: Option<&Path>,
    sequential: bool,
) -> Result<(PathBuf, ExperimentOutput)> {
    let cfg = ExperimentConfig::load(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let out = run_experiment(&cfg, base, sequential)?;
    let dir = output.map_or_else(|| cfg.output.clone(), Path::to_path_buf);
    write_outputs(&dir, &out)?;
    Ok((dir, out))
}

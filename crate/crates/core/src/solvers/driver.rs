use std::time::Instant;

use super::projected::{gd_step, nag_step, ProjectedState};
use super::{afw_step, extrafw_step, fw_step, Counting, Domain, Solver, SolverState, VectorDomain};
use crate::certificates::Certificate;
use crate::error::{Error, Result};
use crate::problem::{ConstraintSet, Objective, FEASIBILITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub iterations: usize,
    /// Stop once the solver's certificate is at most this value.
    pub tolerance: Option<f64>,
}

impl RunOptions {
    pub fn new(iterations: usize) -> Self {
        RunOptions {
            iterations,
            tolerance: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub objective: f64,
    /// Gap bound (AFW, ExtraFW) or duality gap (FW); `None` for GD and NAG.
    pub certificate: Option<f64>,
    pub certificate_min: Option<f64>,
    pub phi_star: Option<f64>,
    /// Time since the start of the run.
    pub wall_nanos: u64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome<P> {
    pub records: Vec<IterationRecord>,
    pub final_point: P,
    pub fo_calls: usize,
    pub lmo_calls: usize,
    pub stopped_at: Option<usize>,
}

struct Recorder<P, F: FnMut(&IterationRecord, &P) -> Result<()>> {
    start: Instant,
    records: Vec<IterationRecord>,
    best: Option<f64>,
    tolerance: Option<f64>,
    observe: F,
    _point: std::marker::PhantomData<fn(&P)>,
}

impl<P, F: FnMut(&IterationRecord, &P) -> Result<()>> Recorder<P, F> {
    fn new(tolerance: Option<f64>, observe: F) -> Self {
        Recorder {
            start: Instant::now(),
            records: Vec::new(),
            best: None,
            tolerance,
            observe,
            _point: std::marker::PhantomData,
        }
    }

    /// Records one iterate and reports whether the stopping rule fired.
    fn push(
        &mut self,
        k: usize,
        objective: f64,
        certificate: Option<f64>,
        phi_star: Option<f64>,
        x: &P,
    ) -> Result<bool> {
        if !objective.is_finite() {
            return Err(Error::NonFinite("objective value"));
        }
        if let Some(c) = certificate {
            self.best = Some(self.best.map_or(c, |b| b.min(c)));
        }
        let rec = IterationRecord {
            k,
            objective,
            certificate,
            certificate_min: self.best,
            phi_star,
            wall_nanos: self.start.elapsed().as_nanos() as u64,
        };
        (self.observe)(&rec, x)?;
        self.records.push(rec);
        Ok(matches!((certificate, self.tolerance), (Some(c), Some(eps)) if c <= eps))
    }
}

/// Runs FW, AFW or ExtraFW for `opts.iterations` steps from `x0`, calling
/// `observe` on every recorded iterate. Monitoring evaluations (objective
/// values the step itself does not produce) are not counted as oracle calls.
pub fn run_frank_wolfe<D, F>(
    solver: Solver,
    domain: &D,
    x0: D::Point,
    opts: &RunOptions,
    observe: F,
) -> Result<RunOutcome<D::Point>>
where
    D: Domain + ?Sized,
    F: FnMut(&IterationRecord, &D::Point) -> Result<()>,
{
    let counted = Counting::new(domain);
    let mut state = SolverState::new(&counted, x0)?;
    let mut rec = Recorder::new(opts.tolerance, observe);
    let mut stopped_at = None;
    let total = opts.iterations;

    match solver {
        Solver::Fw => loop {
            let k = state.k;
            if k == total {
                let (f, grad) = domain.evaluate(&state.x)?;
                let gap = match domain.lmo(&grad) {
                    Ok(v) => domain.pair_point(&grad, &state.x) - domain.pair_atom(&grad, &v),
                    Err(Error::ZeroGradient) => 0.0,
                    Err(e) => return Err(e),
                };
                if rec.push(k, f, Some(gap), None, &state.x)? {
                    stopped_at = Some(k);
                }
                break;
            }
            let current = state.x.clone();
            let report = fw_step(&mut state, &counted)?;
            let f = report.value_at_current.expect("fw step evaluates the iterate");
            if rec.push(k, f, report.duality_gap, None, &current)? {
                state.x = current;
                stopped_at = Some(k);
                break;
            }
        },
        Solver::Afw | Solver::ExtraFw => {
            let (f0, _) = domain.evaluate(&state.x)?;
            let mut cert = Certificate::new(f0);
            if rec.push(0, f0, Some(cert.bound), Some(cert.phi_star), &state.x)? {
                stopped_at = Some(0);
            }
            while stopped_at.is_none() && state.k < total {
                let report = if solver == Solver::Afw {
                    afw_step(&mut state, &counted)?
                } else {
                    extrafw_step(&mut state, &counted)?
                };
                let f_next = match report.value_at_next {
                    Some(f) => f,
                    None => domain.evaluate(&state.x)?.0,
                };
                cert.update(
                    report.delta,
                    report.linearization_offset.expect("averaged step reports offset"),
                    report.g_dot_v.expect("averaged step reports <g, v>"),
                    f_next,
                );
                if rec.push(state.k, f_next, Some(cert.bound), Some(cert.phi_star), &state.x)? {
                    stopped_at = Some(state.k);
                }
            }
        }
        Solver::Gd | Solver::Nag => {
            return Err(Error::InvalidArgument(format!(
                "{} is not a Frank-Wolfe method",
                solver.name()
            )))
        }
    }

    Ok(RunOutcome {
        records: rec.records,
        final_point: state.x,
        fo_calls: counted.fo_calls(),
        lmo_calls: counted.lmo_calls(),
        stopped_at,
    })
}

/// Runs projected GD or NAG with step `1/lipschitz`.
pub fn run_projected<O, F>(
    solver: Solver,
    objective: &O,
    constraint: &ConstraintSet,
    lipschitz: f64,
    x0: Vec<f64>,
    opts: &RunOptions,
    observe: F,
) -> Result<RunOutcome<Vec<f64>>>
where
    O: Objective + ?Sized,
    F: FnMut(&IterationRecord, &Vec<f64>) -> Result<()>,
{
    let step = match solver {
        Solver::Gd => gd_step::<O>,
        Solver::Nag => nag_step::<O>,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "{} is not a projected gradient method",
                solver.name()
            )))
        }
    };
    let mut state = ProjectedState::new(x0);
    let mut rec = Recorder::new(None, observe);
    let mut fo_calls = 0;
    loop {
        let (f, _) = objective.evaluate(&state.x)?;
        rec.push(state.k, f, None, None, &state.x)?;
        if state.k == opts.iterations {
            break;
        }
        step(&mut state, objective, constraint, lipschitz)?;
        fo_calls += 1;
    }
    Ok(RunOutcome {
        records: rec.records,
        final_point: state.x,
        fo_calls,
        lmo_calls: 0,
        stopped_at: None,
    })
}

/// Runs any solver on a dense-vector problem. GD and NAG use `lipschitz`,
/// falling back to the objective's own constant.
pub fn run<O, F>(
    solver: Solver,
    objective: &O,
    constraint: &ConstraintSet,
    x0: Vec<f64>,
    lipschitz: Option<f64>,
    opts: &RunOptions,
    observe: F,
) -> Result<RunOutcome<Vec<f64>>>
where
    O: Objective + ?Sized,
    F: FnMut(&IterationRecord, &Vec<f64>) -> Result<()>,
{
    if !constraint.contains(&x0, FEASIBILITY_TOL)? {
        return Err(Error::InvalidArgument("starting point is infeasible".into()));
    }
    if solver.is_frank_wolfe() {
        let domain = VectorDomain::new(objective, *constraint)?;
        run_frank_wolfe(solver, &domain, x0, opts, observe)
    } else {
        let l = lipschitz.or_else(|| objective.lipschitz()).ok_or_else(|| {
            Error::InvalidArgument(format!("{} needs a Lipschitz constant", solver.name()))
        })?;
        run_projected(solver, objective, constraint, l, x0, opts, observe)
    }
}

use super::{Domain, SolverState, StepReport, StepSchedule};
use crate::error::{Error, Result};

/// LMO with a fallback atom for a vanishing gradient.
fn lmo_or<D: Domain + ?Sized>(domain: &D, g: &D::Grad, fallback: &D::Atom) -> Result<D::Atom> {
    match domain.lmo(g) {
        Err(Error::ZeroGradient) => Ok(fallback.clone()),
        other => other,
    }
}

/// Classic Frank-Wolfe with `delta_k = 2/(k+2)`. A zero gradient leaves the
/// iterate in place.
pub fn fw_step<D: Domain + ?Sized>(state: &mut SolverState<D>, domain: &D) -> Result<StepReport> {
    let delta = StepSchedule::Classic.delta(state.k);
    let (value, grad) = domain.evaluate(&state.x)?;
    let mut report = StepReport {
        delta,
        value_at_current: Some(value),
        ..StepReport::default()
    };
    match domain.lmo(&grad) {
        Ok(v) => {
            let gap = domain.pair_point(&grad, &state.x) - domain.pair_atom(&grad, &v);
            report.duality_gap = Some(gap);
            state.x = domain.step(&state.x, &v, delta);
            state.v = v;
        }
        Err(Error::ZeroGradient) => report.duality_gap = Some(0.0),
        Err(e) => return Err(e),
    }
    state.g = grad;
    state.k += 1;
    Ok(report)
}

/// Averaged Frank-Wolfe: the LMO sees a running average of gradients taken
/// at `y_k = (1 - delta) x_k + delta v_k`.
pub fn afw_step<D: Domain + ?Sized>(state: &mut SolverState<D>, domain: &D) -> Result<StepReport> {
    let delta = StepSchedule::Shifted.delta(state.k);
    let y = domain.step(&state.x, &state.v, delta);
    let (fy, grad_y) = domain.evaluate(&y)?;
    let g = domain.average(&state.g, &grad_y, delta);
    let v = lmo_or(domain, &g, &state.v)?;
    let report = StepReport {
        delta,
        linearization_offset: Some(fy - domain.pair_point(&grad_y, &y)),
        g_dot_v: Some(domain.pair_atom(&g, &v)),
        ..StepReport::default()
    };
    state.x = domain.step(&state.x, &v, delta);
    state.g = g;
    state.v = v;
    state.k += 1;
    Ok(report)
}

/// ExtraFW: a predicted average drives the update of `x`, then the average
/// is corrected with the gradient at the new point and a second LMO picks
/// the atom carried into the next step.
pub fn extrafw_step<D: Domain + ?Sized>(
    state: &mut SolverState<D>,
    domain: &D,
) -> Result<StepReport> {
    let delta = StepSchedule::Shifted.delta(state.k);
    let y = domain.step(&state.x, &state.v, delta);
    let (_, grad_y) = domain.evaluate(&y)?;
    let g_pred = domain.average(&state.g, &grad_y, delta);
    let v_pred = lmo_or(domain, &g_pred, &state.v)?;
    let x = domain.step(&state.x, &v_pred, delta);

    let (fx, grad_x) = domain.evaluate(&x)?;
    let g = domain.average(&state.g, &grad_x, delta);
    let v = lmo_or(domain, &g, &v_pred)?;
    let report = StepReport {
        delta,
        linearization_offset: Some(fx - domain.pair_point(&grad_x, &x)),
        g_dot_v: Some(domain.pair_atom(&g, &v)),
        value_at_next: Some(fx),
        ..StepReport::default()
    };
    state.x = x;
    state.g = g;
    state.v = v;
    state.k += 1;
    Ok(report)
}

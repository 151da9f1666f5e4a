//! Computable optimality certificates.
//!
//! AFW and ExtraFW maintain a lower model of `f` built from the same
//! linearizations that enter their gradient average. Its minimum over the
//! feasible set, `phi_star`, yields an upper bound on `f(x_k) - f*`. Plain FW
//! reports its duality gap instead.

use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    /// Weight left on the initial model; `1` before any update.
    pub lambda: f64,
    /// Constant part of the lower model.
    pub v: f64,
    pub phi_star: f64,
    pub f0: f64,
    /// Bound on `f(x_k) - f*` at the most recent iterate.
    pub bound: f64,
}

impl Certificate {
    pub fn new(f0: f64) -> Self {
        Certificate {
            lambda: 1.0,
            v: f0,
            phi_star: f0,
            f0,
            bound: f64::INFINITY,
        }
    }

    /// Folds in one step. `offset` is `f(z) - <grad f(z), z>` at the
    /// linearization point, `g_dot_v` is `<g_{k+1}, v_{k+1}>` and `f_next`
    /// is `f(x_{k+1})`.
    pub fn update(&mut self, delta: f64, offset: f64, g_dot_v: f64, f_next: f64) {
        self.lambda *= 1.0 - delta;
        self.v = (1.0 - delta) * self.v + delta * offset;
        self.phi_star = self.v + g_dot_v;
        self.bound = self.gap_bound(f_next);
    }

    /// `(f - phi* - lambda (f - f0)) / (1 - lambda)`, infinite while
    /// `lambda = 1`.
    pub fn gap_bound(&self, f: f64) -> f64 {
        if self.lambda >= 1.0 {
            return f64::INFINITY;
        }
        (f - self.phi_star - self.lambda * (f - self.f0)) / (1.0 - self.lambda)
    }
}

/// Dense-vector form of [`Certificate::update`] with the linearization taken
/// at `x_next`.
#[allow(clippy::too_many_arguments)]
pub fn cert_update(
    cert: &mut Certificate,
    delta: f64,
    f_next: f64,
    grad_next: &[f64],
    x_next: &[f64],
    g_next: &[f64],
    v_next: &[f64],
) {
    let offset = f_next - linalg::dot(grad_next, x_next);
    cert.update(delta, offset, linalg::dot(g_next, v_next), f_next);
}

/// `<grad f(x), x - v>`.
pub fn fw_duality_gap(grad: &[f64], x: &[f64], v: &[f64]) -> f64 {
    linalg::dot(grad, x) - linalg::dot(grad, v)
}

/// `xi_{k+1} = (1 - delta_k) xi_k + 1.5 L D^2 delta_k^2`, `xi_0 = 0`: the
/// slack by which `f(x_k)` may exceed `phi_star`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiSequence {
    pub value: f64,
    lipschitz: f64,
    diameter: f64,
}

impl XiSequence {
    pub fn new(lipschitz: f64, diameter: f64) -> Self {
        XiSequence {
            value: 0.0,
            lipschitz,
            diameter,
        }
    }

    pub fn advance(&mut self, delta: f64) -> f64 {
        self.value = (1.0 - delta) * self.value
            + 1.5 * self.lipschitz * self.diameter * self.diameter * delta * delta;
        self.value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::StepSchedule;

    #[test]
    fn init_values() {
        let c = Certificate::new(0.693147);
        assert_eq!((c.lambda, c.v, c.phi_star), (1.0, 0.693147, 0.693147));
        assert!(c.bound.is_infinite());
        assert!(c.gap_bound(0.5).is_infinite());
        let z = Certificate::new(0.0);
        assert_eq!((z.lambda, z.v, z.phi_star), (1.0, 0.0, 0.0));
    }

    #[test]
    fn first_extrafw_update_by_hand() {
        let mut c = Certificate::new(2.0);
        cert_update(
            &mut c,
            2.0 / 3.0,
            8.0 / 9.0,
            &[-4.0 / 3.0, 0.0],
            &[2.0 / 3.0, 0.0],
            &[-8.0 / 9.0, 0.0],
            &[1.0, 0.0],
        );
        assert!((c.lambda - 1.0 / 3.0).abs() < 1e-15);
        assert!((c.v - 50.0 / 27.0).abs() < 1e-14);
        assert!((c.phi_star - 26.0 / 27.0).abs() < 1e-14);
    }

    #[test]
    fn constant_function_keeps_model_flat() {
        let mut c = Certificate::new(3.0);
        for k in 0..100 {
            cert_update(&mut c, StepSchedule::Shifted.delta(k), 3.0, &[0.0], &[0.5], &[0.0], &[1.0]);
            assert!((c.v - 3.0).abs() < 1e-12);
            assert!((c.phi_star - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_closed_form() {
        let mut c = Certificate::new(1.0);
        for k in 0..10_000usize {
            c.update(StepSchedule::Shifted.delta(k), 0.0, 0.0, 0.0);
            let kk = (k + 1) as f64;
            let exact = 2.0 / ((kk + 1.0) * (kk + 2.0));
            assert!((c.lambda - exact).abs() <= 1e-12 * exact, "k = {}", k + 1);
        }
    }

    #[test]
    fn duality_gap_examples() {
        assert_eq!(fw_duality_gap(&[-2.0, 0.0], &[0.0, 0.0], &[1.0, 0.0]), 2.0);
        assert_eq!(fw_duality_gap(&[0.0, 0.0], &[0.3, 0.1], &[1.0, 0.0]), 0.0);
    }

    #[test]
    fn xi_first_step() {
        let mut xi = XiSequence::new(1.0, 2.0);
        let d = 2.0 / 3.0;
        assert!((xi.advance(d) - 1.5 * 4.0 * d * d).abs() < 1e-15);
    }
}

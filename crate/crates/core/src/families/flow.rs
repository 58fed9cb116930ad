use crate::diffeo::{DiffeoSpec, IntervalMap};
use crate::numeric::ode::integrate_autonomous;

/// Time-`t` map of `dx/dt = phi(x)` for a base displacement `phi`.
///
/// The derivative comes from `(g^t)'(x) = phi(g^t(x)) / phi(x)`, evaluated
/// as a difference of `log phi`, and equals 1 where `phi` vanishes.
#[derive(Debug, Clone)]
pub struct FlowMap {
    pub base: DiffeoSpec,
    pub t: f64,
    pub step_tol: f64,
}

impl FlowMap {
    /// Flow over an arbitrary time, `NaN` when the integrator fails.
    pub fn flow(&self, x: f64, t: f64) -> f64 {
        if self.base.map().is_fixed(x) {
            return x;
        }
        let field = |y: f64| self.base.map().displacement(y);
        integrate_autonomous(&field, x, t, self.step_tol).unwrap_or(f64::NAN)
    }

    pub fn try_flow(&self, x: f64, t: f64) -> crate::Result<f64> {
        if self.base.map().is_fixed(x) {
            return Ok(x);
        }
        let field = |y: f64| self.base.map().displacement(y);
        integrate_autonomous(&field, x, t, self.step_tol)
    }

    #[inline]
    fn log_ratio(&self, x: f64, y: f64) -> f64 {
        let m = self.base.map();
        if m.is_fixed(x) {
            return 0.0;
        }
        m.log_displacement(y) - m.log_displacement(x)
    }
}

impl IntervalMap for FlowMap {
    fn displacement(&self, x: f64) -> f64 {
        self.apply(x) - x
    }
    fn displacement_deriv(&self, x: f64) -> f64 {
        self.log_derivative(x).exp_m1()
    }
    fn apply(&self, x: f64) -> f64 {
        self.flow(x, self.t)
    }
    fn derivative(&self, x: f64) -> f64 {
        self.log_derivative(x).exp()
    }
    fn log_derivative(&self, x: f64) -> f64 {
        self.log_ratio(x, self.apply(x))
    }
    fn step(&self, x: f64) -> (f64, f64) {
        let y = self.apply(x);
        (y, self.log_ratio(x, y))
    }
    fn is_fixed(&self, x: f64) -> bool {
        self.t == 0.0 || self.base.map().is_fixed(x)
    }
    fn closed_iterate(&self, x: f64, n: f64) -> Option<(f64, f64)> {
        let y = self.flow(x, n * self.t);
        y.is_finite().then(|| (y, self.log_ratio(x, y)))
    }
}

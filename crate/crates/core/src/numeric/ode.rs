use crate::error::{Error, Result};

/// Smallest step the integrator may take before giving up.
pub const STEP_FLOOR: f64 = 1e-12;

fn rk4_step<F: Fn(f64) -> f64>(field: &F, y: f64, h: f64) -> f64 {
    let k1 = field(y);
    let k2 = field(y + 0.5 * h * k1);
    let k3 = field(y + 0.5 * h * k2);
    let k4 = field(y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates `dy/dt = field(y)` from `y0` over time `t >= 0` with classical
/// RK4 and step doubling. The local error estimate of each accepted step is
/// at most `step_tol * h`, so errors are bounded per unit time.
pub fn integrate_autonomous<F: Fn(f64) -> f64>(field: &F, y0: f64, t: f64, step_tol: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(y0);
    }
    if !(t > 0.0) || !(step_tol > 0.0) {
        return Err(Error::Argument(format!("need t >= 0 and step_tol > 0, got t={t}, step_tol={step_tol}")));
    }
    let mut y = y0;
    let mut elapsed = 0.0;
    let mut h = t.min(0.25);
    while elapsed < t {
        let h_try = h.min(t - elapsed);
        let full = rk4_step(field, y, h_try);
        let half = rk4_step(field, y, 0.5 * h_try);
        let two_halves = rk4_step(field, half, 0.5 * h_try);
        let err = (two_halves - full).abs() / 15.0;
        if !two_halves.is_finite() {
            return Err(Error::Precision(format!("non-finite state at t={elapsed}")));
        }
        if err <= step_tol * h_try {
            y = two_halves + (two_halves - full) / 15.0;
            elapsed += h_try;
            // Grow cautiously; fifth-order local error.
            let grow = if err == 0.0 { 2.0 } else { (0.9 * (step_tol * h_try / err).powf(0.2)).clamp(0.2, 2.0) };
            h = (h_try * grow).min(1.0);
        } else {
            h = h_try * (0.9 * (step_tol * h_try / err).powf(0.2)).clamp(0.1, 0.9);
            if h < STEP_FLOOR {
                return Err(Error::Precision(format!(
                    "step fell below {STEP_FLOOR:e} at t={elapsed} with tolerance {step_tol:e}"
                )));
            }
        }
    }
    Ok(y)
}

use crate::error::{Error, Result};

/// Upper bound on halvings for every bisection in the crate.
pub const MAX_HALVINGS: usize = 200;

/// Root of a function that changes sign on `[lo, hi]`.
///
/// Stops as soon as `|g(mid)| <= tol`, when the bracket can no longer be
/// split in floating point, or after [`MAX_HALVINGS`] halvings.
pub fn bisect_sign_change<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::Argument(format!(
            "no sign change on [{lo}, {hi}]: g(lo)={g_lo}, g(hi)={g_hi}"
        )));
    }
    let mut best = if g_lo.abs() < g_hi.abs() { lo } else { hi };
    let mut best_val = g_lo.abs().min(g_hi.abs());
    for _ in 0..MAX_HALVINGS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid.abs() < best_val {
            best = mid;
            best_val = g_mid.abs();
        }
        if g_mid.abs() <= tol || g_mid == 0.0 {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Solves `h(x) = target` for a strictly increasing `h` on `[lo, hi]`.
/// Returns the best point found and the final residual.
pub fn bisect_increasing<H: Fn(f64) -> f64>(h: H, target: f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut best = lo;
    let mut best_res = f64::INFINITY;
    for _ in 0..MAX_HALVINGS {
        let mid = 0.5 * (lo + hi);
        let r = h(mid) - target;
        if r.abs() < best_res {
            best = mid;
            best_res = r.abs();
        }
        if r.abs() <= tol || mid <= lo || mid >= hi {
            break;
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (best, best_res)
}

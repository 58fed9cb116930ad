use crate::error::{Error, Result};

/// Maximum recursion depth of [`adaptive_simpson`].
pub const MAX_DEPTH: u32 = 60;

/// Adaptive Simpson quadrature with a relative tolerance.
///
/// Each panel is accepted when the two-panel refinement agrees with the
/// coarse estimate to `15 * tol * |estimate|` (or an absolute floor when the
/// integral is tiny). Exceeding [`MAX_DEPTH`] is a precision error.
pub fn adaptive_simpson<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = g(a);
    let fb = g(b);
    let m = 0.5 * (a + b);
    let fm = g(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    if !whole.is_finite() {
        return Err(Error::Precision(format!("integrand not finite on [{a}, {b}]")));
    }
    let abs_floor = whole.abs() * rel_tol;
    recurse(g, a, b, fa, fm, fb, whole, rel_tol, abs_floor, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn recurse<G: Fn(f64) -> f64>(
    g: &G,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    rel_tol: f64,
    abs_floor: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = g(lm);
    let frm = g(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let refined = left + right;
    if !refined.is_finite() {
        return Err(Error::Precision(format!("integrand not finite on [{a}, {b}]")));
    }
    let delta = refined - whole;
    let tol = (rel_tol * refined.abs()).max(abs_floor * f64::EPSILON.sqrt());
    if delta.abs() <= 15.0 * tol || m <= a || m >= b {
        return Ok(refined + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Precision(format!(
            "adaptive Simpson did not converge on [{a}, {b}]"
        )));
    }
    let l = recurse(g, a, m, fa, flm, fm, left, rel_tol, abs_floor, depth - 1)?;
    let r = recurse(g, m, b, fm, frm, fb, right, rel_tol, abs_floor, depth - 1)?;
    Ok(l + r)
}

//! Checks on the explicit oscillating displacement and Hölder seminorms.

use std::f64::consts::TAU;

use crate::diffeo::DiffeoSpec;
use crate::error::{Error, Result};
use crate::families::bar_phi_deriv_raw;
use crate::numeric::holder::holder_seminorm;
use crate::numeric::CompensatedSum;

use super::report::LemmaReport;

/// Empirical Hölder seminorm of `g` on `[lo, hi]` over a uniform grid.
pub fn hoelder_constant<G: Fn(f64) -> f64 + Sync>(g: G, lo: f64, hi: f64, alpha: f64, grid_size: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Argument(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    Ok(holder_seminorm(g, lo, hi, alpha, grid_size))
}

/// Hölder seminorm of `f'` on `[0, 1]`.
pub fn hoelder_constant_of_derivative(spec: &DiffeoSpec, alpha: f64, grid_size: usize) -> Result<f64> {
    hoelder_constant(|x| spec.map().derivative(x), 0.0, 1.0, alpha, grid_size)
}

/// `sum log(1 + bar_phi'(x_k))` along the exact orbit `x_k = (N+1-k)^{-beta}`,
/// `k < N` (the last point `x_N = 1` is where `bar_phi'` is singular).
pub fn lattice_distortion_sum(alpha: f64, beta: f64, big_n: u64) -> f64 {
    let mut s = CompensatedSum::new();
    for j in 2..=big_n {
        let x = (j as f64).powf(-beta);
        s.add(bar_phi_deriv_raw(alpha, beta, x).ln_1p());
    }
    s.value()
}

/// Ratio of [`lattice_distortion_sum`] to
/// `2 pi / (beta (1 - alpha (beta+1))) N^{1 - alpha(beta+1)}`; passes within 15%.
pub fn verify_eq39(alpha: f64, beta: f64, big_n: u64) -> Result<LemmaReport> {
    let gap = 1.0 - alpha * (beta + 1.0);
    if !(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && gap > 0.0) {
        return Err(Error::InvalidParameter(format!("need beta + 1 < 1/alpha, got alpha={alpha}, beta={beta}")));
    }
    let sum = lattice_distortion_sum(alpha, beta, big_n);
    let model = TAU / (beta * gap) * (big_n as f64).powf(gap);
    Ok(LemmaReport::bracket("eq39", sum / model, Some(0.85), Some(1.15))
        .detail("sum", sum)
        .detail("asymptotic", model)
        .detail("N", big_n as f64))
}

/// `bar_phi'(k^{-beta}) k^{alpha(beta+1)} / (2 pi / beta)`; passes within 5%.
pub fn verify_eq741(alpha: f64, beta: f64, k: u64) -> Result<LemmaReport> {
    if !(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta + 1.0 < 1.0 / alpha) {
        return Err(Error::InvalidParameter(format!("need beta + 1 < 1/alpha, got alpha={alpha}, beta={beta}")));
    }
    let kf = k as f64;
    let d = bar_phi_deriv_raw(alpha, beta, kf.powf(-beta));
    let ratio = d * kf.powf(alpha * (beta + 1.0)) / (TAU / beta);
    Ok(LemmaReport::bracket("eq741", ratio, Some(0.95), Some(1.05)).detail("derivative", d).detail("k", kf))
}

/// `g(x) = x^b sin(x^{-p})`, extended by `g(0) = 0`.
pub fn oscillating_power(b: f64, p: f64) -> impl Fn(f64) -> f64 + Sync {
    move |x: f64| if x > 0.0 { x.powf(b) * x.powf(-p).sin() } else { 0.0 }
}

/// Seminorm of `x^b sin(x^{-p})` at `grid` and `2 grid`. When
/// `b >= (p+1) alpha` the pass flag asks for a relative change below 20%;
/// below that exponent it asks for growth above 50%.
pub fn verify_lemma_l6(alpha: f64, p: f64, b: f64, grid: usize) -> Result<LemmaReport> {
    let g = oscillating_power(b, p);
    let coarse = hoelder_constant(&g, 0.0, 1.0, alpha, grid)?;
    let fine = hoelder_constant(&g, 0.0, 1.0, alpha, 2 * grid)?;
    let change = (fine - coarse) / coarse;
    let regular = b >= (p + 1.0) * alpha;
    let report = if regular {
        let mut r = LemmaReport::bracket("l6", change.abs(), None, Some(0.2));
        r.note = "exponent in the lemma's range: seminorm must be stable under grid doubling".into();
        r
    } else {
        let mut r = LemmaReport::bracket("l6", change, Some(0.5), None);
        r.note = "exponent below the lemma's range: seminorm must grow under grid doubling".into();
        r
    };
    Ok(report.detail("seminorm_coarse", coarse).detail("seminorm_fine", fine).detail("grid", grid as f64))
}

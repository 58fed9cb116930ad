//! Numerical checks of the distortion lemmas along orbits.

use crate::diffeo::DiffeoSpec;
use crate::error::{Error, Result};
use crate::families::FlowMap;
use crate::fixed_points::find_fixed_points;
use crate::numeric::quadrature::adaptive_simpson;
use crate::orbit::{iterate_orbit, phi_sum};
use crate::par;

use super::report::{spread, LemmaReport};

/// Ratio spread accepted as "bounded" across a ladder.
pub const SPREAD_BOUND: f64 = 10.0;

const FIXED_GRID: usize = 2000;

/// Maximal fixed-point-free interval `(a, b)` containing `x`.
fn free_interval(spec: &DiffeoSpec, x: f64) -> Result<(f64, f64)> {
    let set = find_fixed_points(spec, FIXED_GRID, 1e-12);
    if spec.displacement().is_zero(x) || set.in_fixed_interval(x) {
        return Err(Error::Argument(format!("{x} is a fixed point")));
    }
    let a = set.points.iter().copied().filter(|&p| p < x).fold(0.0, f64::max);
    let b = set.points.iter().copied().filter(|&p| p > x).fold(1.0, f64::min);
    Ok((a, b))
}

/// Samples `count` points uniformly over `[lo, hi]`, endpoints included.
fn samples(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
}

/// `|log(phi(x_n)/phi(x_1)) - Phi(n-1, x_1)| / |I|` on a maximal
/// fixed-point-free interval `I = [a, b]`.
pub fn verify_lemma_pr1(spec: &DiffeoSpec, interval: (f64, f64), x1: f64, n: u64) -> Result<LemmaReport> {
    let (a, b) = interval;
    if !(a < x1 && x1 < b) {
        return Err(Error::Argument(format!("x1 = {x1} must lie in ({a}, {b})")));
    }
    let (fa, fb) = free_interval(spec, x1)?;
    if (fa - a).abs() > 1e-6 || (fb - b).abs() > 1e-6 {
        return Err(Error::Argument(format!(
            "[{a}, {b}] is not a maximal fixed-point-free interval; found ({fa}, {fb})"
        )));
    }
    let phi = spec.displacement();
    let sign = phi.value(x1).signum();
    if samples(a, b, 1001).skip(1).take(999).any(|t| phi.value(t) * sign < 0.0) {
        return Err(Error::Argument(format!("displacement changes sign in ({a}, {b})")));
    }
    if n < 1 {
        return Err(Error::Argument("n must be at least 1".into()));
    }
    let (xn, phi_n1) = if n == 1 {
        (x1, 0.0)
    } else {
        let o = iterate_orbit(spec, x1, n - 1)?;
        (*o.points.last().expect("orbit"), o.phi())
    };
    let residual = ((phi.log_abs(xn) - phi.log_abs(x1)) - phi_n1).abs();
    let ratio = residual / (b - a);
    Ok(LemmaReport::bracket("pr1", ratio, None, Some(SPREAD_BOUND))
        .at(xn)
        .detail("residual", residual)
        .detail("n", n as f64)
        .detail("interval_length", b - a))
}

/// [`verify_lemma_pr1`] over a ladder of `n`; passes when the ratios stay
/// within a factor [`SPREAD_BOUND`] of each other.
pub fn verify_lemma_pr1_ladder(spec: &DiffeoSpec, interval: (f64, f64), x1: f64, ns: &[u64]) -> Result<LemmaReport> {
    let reports = ns.iter().map(|&n| verify_lemma_pr1(spec, interval, x1, n)).collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = reports.iter().map(|r| r.measured).collect();
    let s = spread(&ratios);
    let mut out = LemmaReport::bracket("pr1", s, None, Some(SPREAD_BOUND)).note("measured is the max/min spread of residual/|I|");
    for (n, r) in ns.iter().zip(&ratios) {
        out = out.detail(&format!("ratio_n{n}"), *r);
    }
    Ok(out)
}

/// `max phi(y) / phi(x)` over `y ∈ [x, x + delta^{-1/2} phi(x)^{1/2}]`,
/// provided `|phi''| <= delta` on the doubled side interval.
pub fn verify_lemma_pr2(spec: &DiffeoSpec, x: f64, delta: f64) -> Result<LemmaReport> {
    const ID: &str = "pr2";
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Argument(format!("delta must lie in (0, 1], got {delta}")));
    }
    let (a, b) = free_interval(spec, x)?;
    let phi = spec.displacement();
    let side = if x - a <= 0.5 * (b - a) { (a, 2.0 * x - a) } else { (2.0 * x - b, b) };
    let mut max_pp = 0.0f64;
    for t in samples(side.0, side.1, 201) {
        max_pp = max_pp.max(phi.deriv_order(t, 2)?.abs());
    }
    // Finite-difference noise sits well below this slack.
    if max_pp > delta * (1.0 + 1e-6) {
        return Ok(LemmaReport::not_applicable(ID, format!("max |phi''| = {max_pp:e} exceeds delta = {delta:e}"))
            .detail("max_phi_second", max_pp));
    }
    let px = phi.value(x).abs();
    let reach = (px / delta).sqrt();
    let mut worst = 1.0f64;
    let mut worst_y = x;
    for y in samples(x, (x + reach).min(b), 401) {
        let r = phi.value(y).abs() / px;
        if r > worst {
            worst = r;
            worst_y = y;
        }
    }
    Ok(LemmaReport::bracket(ID, worst, None, Some(4.0))
        .at(worst_y)
        .detail("max_phi_second", max_pp)
        .detail("reach", reach)
        .detail("interval_lo", a)
        .detail("interval_hi", b))
}

/// `(1/(n-1)) ∫_{x_1}^{x_n} dt / phi(t)` against the bracket `[2/3, 2]`.
pub fn verify_lemma_pr3(spec: &DiffeoSpec, x1: f64, n: u64) -> Result<LemmaReport> {
    const ID: &str = "pr3";
    if n < 2 {
        return Err(Error::Argument("n must be at least 2".into()));
    }
    let orbit = iterate_orbit(spec, x1, n - 1)?;
    let xn = *orbit.points.last().expect("orbit");
    let (lo, hi) = if xn >= x1 { (x1, xn) } else { (xn, x1) };
    let phi = spec.displacement();
    let mut max_dphi = 0.0f64;
    for t in samples(lo, hi, 2001).chain(orbit.points.iter().copied()) {
        let v = phi.value(t);
        if !(v.abs() > 0.0) || v.signum() != (xn - x1).signum() {
            return Ok(LemmaReport::not_applicable(ID, format!("displacement vanishes or changes sign at {t}")));
        }
        max_dphi = max_dphi.max(phi.deriv(t).abs());
    }
    if max_dphi > 0.5 {
        return Ok(LemmaReport::not_applicable(ID, format!("max |phi'| = {max_dphi} exceeds 1/2"))
            .detail("max_phi_prime", max_dphi));
    }
    let integral = adaptive_simpson(&|t: f64| 1.0 / phi.value(t).abs(), lo, hi, 1e-8)?;
    let normalized = integral / (n - 1) as f64;
    Ok(LemmaReport::bracket(ID, normalized, Some(2.0 / 3.0), Some(2.0))
        .at(xn)
        .detail("integral", integral)
        .detail("max_phi_prime", max_dphi))
}

/// Oscillation of `Phi(n, .)` over stratified samples of a wandering
/// interval `J`, normalised by `n^{1-alpha}`, over the ladder
/// `n/100, n/10, n`. Passes when the normalised values stay within
/// [`SPREAD_BOUND`] of each other.
pub fn verify_lemma_l4(spec: &DiffeoSpec, j: (f64, f64), n: u64, pair_samples: usize, alpha: f64) -> Result<LemmaReport> {
    let ladder: Vec<u64> = [n / 100, n / 10, n].into_iter().filter(|&m| m >= 1).collect();
    verify_lemma_l4_ladder(spec, j, &ladder, pair_samples, alpha)
}

pub fn verify_lemma_l4_ladder(
    spec: &DiffeoSpec,
    j: (f64, f64),
    ns: &[u64],
    pair_samples: usize,
    alpha: f64,
) -> Result<LemmaReport> {
    let (lo, hi) = j;
    if !(lo <= hi) {
        return Err(Error::Argument(format!("empty interval [{lo}, {hi}]")));
    }
    let (flo, fhi) = (spec.eval(lo)?, spec.eval(hi)?);
    if !(fhi < lo || flo > hi) {
        return Err(Error::Argument(format!("J = [{lo}, {hi}] meets its image [{flo}, {fhi}]")));
    }
    let count = pair_samples.max(2);
    let xs: Vec<f64> = (0..count).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / count as f64).collect();
    let mut ratios = Vec::with_capacity(ns.len());
    let mut report_details = Vec::new();
    let mut worst_x = lo;
    for &n in ns {
        let vals = par::map(&xs, |&x| phi_sum(spec, x, n));
        let vals = vals.into_iter().collect::<Result<Vec<f64>>>()?;
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let imax = vals.iter().position(|&v| v == max).unwrap_or(0);
        worst_x = xs[imax];
        let r = (max - min) / (n as f64).powf(1.0 - alpha);
        ratios.push(r);
        report_details.push((n, r));
    }
    let s = if lo == hi { 1.0 } else { spread(&ratios) };
    let mut out = LemmaReport::bracket("l4", s, None, Some(SPREAD_BOUND))
        .at(worst_x)
        .note("measured is the max/min spread of osc Phi(n, J) / n^(1-alpha)");
    for (n, r) in report_details {
        out = out.detail(&format!("ratio_n{n}"), r);
    }
    Ok(out)
}

/// `sup phi(t)/phi(x)` over `t ∈ [x, x + phi(x)^{1/N}]`, provided
/// `phi(y) <= phi(x)^{1 - 1/(2N)} <= 1` for sampled `y ∈ (0, x)`.
pub fn verify_bounded_oscillation(spec: &DiffeoSpec, big_n: u32, x: f64) -> Result<LemmaReport> {
    const ID: &str = "prn";
    if big_n == 0 {
        return Err(Error::Argument("N must be positive".into()));
    }
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain { x, lo: 0.0, hi: 1.0 });
    }
    let phi = spec.displacement();
    let lx = phi.log_abs(x);
    if !(lx < 0.0) {
        return Ok(LemmaReport::not_applicable(ID, format!("phi({x}) = {} is not below 1", lx.exp())));
    }
    let nf = big_n as f64;
    let cap = lx * (1.0 - 1.0 / (2.0 * nf));
    let probes = samples(0.0, x, 201).skip(1).chain((1..=60).map(|j| x * 0.5f64.powi(j)));
    for y in probes {
        if phi.log_abs(y) > cap {
            return Ok(LemmaReport::not_applicable(ID, format!("growth condition fails at y = {y}")));
        }
    }
    let reach = (lx / nf).exp();
    let mut worst = 1.0f64;
    let mut worst_t = x;
    for t in samples(x, (x + reach).min(1.0), 801) {
        let r = (phi.log_abs(t) - lx).exp();
        if r > worst {
            worst = r;
            worst_t = t;
        }
    }
    let mut max_dphi = 0.0f64;
    for t in samples(x, (x + reach).min(1.0), 201) {
        max_dphi = max_dphi.max(phi.deriv(t).abs());
    }
    Ok(LemmaReport::bracket(ID, worst, None, Some(SPREAD_BOUND))
        .at(worst_t)
        .detail("reach", reach)
        .detail("max_phi_prime", max_dphi))
}

/// [`verify_bounded_oscillation`] over a ladder of `x`; passes when every
/// point is applicable and the ratios stay below [`SPREAD_BOUND`].
pub fn verify_bounded_oscillation_ladder(spec: &DiffeoSpec, big_n: u32, xs: &[f64]) -> Result<LemmaReport> {
    let reports = xs.iter().map(|&x| verify_bounded_oscillation(spec, big_n, x)).collect::<Result<Vec<_>>>()?;
    if let Some(r) = reports.iter().find(|r| !r.applicable) {
        return Ok(LemmaReport::not_applicable("prn", r.note.clone()));
    }
    let worst = reports.iter().map(|r| r.measured).fold(1.0, f64::max);
    let mut out = LemmaReport::bracket("prn", worst, None, Some(SPREAD_BOUND)).note("measured is the largest ratio over the ladder");
    for (x, r) in xs.iter().zip(&reports) {
        out = out.detail(&format!("ratio_x{x:e}"), r.measured);
    }
    Ok(out)
}

/// Relative difference between `exp(Phi(n, x))` along the unit-time flow
/// map and `phi(g^n(x)) / phi(x)` with `g^n(x)` integrated in one go.
pub fn verify_flow_identity(flow: &DiffeoSpec, x: f64, n: u64) -> Result<LemmaReport> {
    const ID: &str = "flow";
    let map = flow
        .map_as::<FlowMap>()
        .ok_or_else(|| Error::Argument("flow identity needs a spec built by flow_family".into()))?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain { x, lo: 0.0, hi: 1.0 });
    }
    let phi = map.base.displacement();
    if !(phi.value(x).abs() > 1e-8) {
        return Ok(LemmaReport::not_applicable(ID, format!("phi({x}) is below 1e-8")));
    }
    if n == 0 {
        return Ok(LemmaReport::bracket(ID, 0.0, None, Some(1e-6)).detail("chain_rule", 1.0).detail("variational", 1.0));
    }
    let chain = phi_sum(flow, x, n)?;
    let y = map.try_flow(x, n as f64 * map.t)?;
    let variational = phi.log_abs(y) - phi.log_abs(x);
    let rel = (chain - variational).exp_m1().abs();
    Ok(LemmaReport::bracket(ID, rel, None, Some(1e-6))
        .at(y)
        .detail("log_chain_rule", chain)
        .detail("log_variational", variational))
}

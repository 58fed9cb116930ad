//! The almost-convexity recurrence
//! `2 a_n - a_{n-1} - a_{n+1} <= K exp(-a_n + K1 n^{1-alpha})` and the
//! sublinear bound `a_n <= A n^{1-alpha}` it implies.

use statrs::function::gamma::{gamma_ur, ln_gamma};

use super::report::LemmaReport;

/// Upper bound on `sum_{k>n} exp(-c k^g)` by `int_n^inf exp(-c t^g) dt
/// = Γ(1/g, c n^g) / (g c^{1/g})`.
fn tail_sum(c: f64, g: f64, n: f64) -> f64 {
    let a = 1.0 / g;
    let x = c * n.powf(g);
    let log_upper = ln_gamma(a) + gamma_ur(a, x).ln();
    (log_upper - g.ln() - a * c.ln()).exp()
}

/// Whether `A` satisfies
/// `A [(n+1)^{1-alpha} - n^{1-alpha}] >= 2K sum_{k>n} exp(-(A/2 - K1) k^{1-alpha})`
/// for every `1 <= n <= n_max`.
fn constant_admissible(a: f64, k: f64, k1: f64, alpha: f64, n_max: usize) -> bool {
    let g = 1.0 - alpha;
    let c = a / 2.0 - k1;
    if !(c > 0.0) {
        return false;
    }
    (1..=n_max).all(|n| {
        let nf = n as f64;
        let lhs = a * ((nf + 1.0).powf(g) - nf.powf(g));
        lhs >= 2.0 * k * tail_sum(c, g, nf)
    })
}

/// Smallest admissible `A` (to relative precision 1e-6), if any exists
/// below `2 K1 + 1e12`.
pub fn smallest_constant(k: f64, k1: f64, alpha: f64, n_max: usize) -> Option<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return None;
    }
    let mut lo = 2.0 * k1;
    let mut hi = lo.max(1.0);
    while !constant_admissible(hi, k, k1, alpha, n_max) {
        hi *= 2.0;
        if hi > 2.0 * k1 + 1e12 {
            return None;
        }
    }
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if constant_admissible(mid, k, k1, alpha, n_max) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Checks the recurrence index by index on `a_0 = 0, a_1, ...` and reports
/// whether the implied bound `a_n <= A n^{1-alpha}` is observed.
pub fn check_almost_convexity(a: &[f64], k: f64, k1: f64, alpha: f64) -> LemmaReport {
    const ID: &str = "almost-convexity";
    if a.len() < 3 {
        return LemmaReport::not_applicable(ID, "sequence needs at least three terms");
    }
    let g = 1.0 - alpha;
    // Margin lhs - rhs, positive where the recurrence fails.
    let mut worst = f64::NEG_INFINITY;
    let mut worst_n = 1usize;
    for n in 1..a.len() - 1 {
        let nf = n as f64;
        let lhs = 2.0 * a[n] - a[n - 1] - a[n + 1];
        let rhs = k * (-a[n] + k1 * nf.powf(g)).exp();
        let margin = lhs - rhs;
        if margin > worst {
            worst = margin;
            worst_n = n;
        }
    }
    let mut report = LemmaReport::bracket(ID, worst, None, Some(0.0)).at(worst_n as f64);
    report.note = "measured is max over n of lhs - rhs".into();
    if let Some(big_a) = smallest_constant(k, k1, alpha, a.len()) {
        let ratio = (1..a.len()).map(|n| a[n] / (n as f64).powf(g)).fold(f64::NEG_INFINITY, f64::max);
        report = report
            .detail("A", big_a)
            .detail("max_a_over_power", ratio)
            .detail("bound_observed", if ratio <= big_a { 1.0 } else { 0.0 });
    }
    report
}

/// Constants making the recurrence hold on `a`: `K1` is half the largest
/// `a_n / n^{1-alpha}`, `K` the smallest value that then covers every index.
pub fn fit_convexity_constants(a: &[f64], alpha: f64) -> (f64, f64) {
    let g = 1.0 - alpha;
    let k1 = 0.5 * (1..a.len()).map(|n| a[n] / (n as f64).powf(g)).fold(0.0, f64::max);
    let mut k = 1e-12f64;
    for n in 1..a.len().saturating_sub(1) {
        let lhs = 2.0 * a[n] - a[n - 1] - a[n + 1];
        if lhs > 0.0 {
            k = k.max(lhs * (a[n] - k1 * (n as f64).powf(g)).exp());
        }
    }
    (k, k1)
}

#![allow(dead_code)]

use growthlab::families::{self, FlatBumpSchedule, HoelderPiece, HoelderSchedule};
use growthlab::DiffeoSpec;

/// Hölder instance with an explicit window, large enough that its
/// oscillating part is visible at desk-scale iteration counts.
pub fn hoelder_instance() -> DiffeoSpec {
    let schedule = HoelderSchedule::new(0.5, vec![HoelderPiece { beta: 0.5, a: 0.0, b: 1.0, scale: 0.2 }]).unwrap();
    families::hoelder_thm3b(&schedule).unwrap()
}

pub fn bump_instance() -> DiffeoSpec {
    families::flat_bump_thm2(&FlatBumpSchedule::default_with(families::DEFAULT_BUMPS)).unwrap()
}

pub fn logistic_flow(t: f64) -> DiffeoSpec {
    let base = families::hyperbolic_unchecked(1.0);
    families::flow_family(&base, t, 1e-12).unwrap()
}

/// Every shipped family at a representative parameter, with a label.
pub fn shipped() -> Vec<(&'static str, DiffeoSpec)> {
    let c3 = 0.5 * families::polynomial_c_max(3);
    vec![
        ("identity", families::identity()),
        ("hyperbolic", families::hyperbolic(0.5).unwrap()),
        ("polynomial2", families::polynomial_flat(2, 1.0).unwrap()),
        ("polynomial3", families::polynomial_flat(3, c3).unwrap()),
        ("conjugated+", families::conjugated_translation(1.0)),
        ("conjugated-", families::conjugated_translation(-1.0)),
        ("flat_exp", families::flat_exp(0.1).unwrap()),
        ("hoelder", hoelder_instance()),
        ("bumps", bump_instance()),
        ("flow", families::flow_family(&families::flat_exp(0.1).unwrap(), 1.0, 1e-10).unwrap()),
    ]
}

pub fn non_identity() -> Vec<(&'static str, DiffeoSpec)> {
    shipped().into_iter().filter(|(name, _)| *name != "identity").collect()
}

/// Length over which `f'` is close to affine at `x`, or `None` when that is
/// below what a double-precision difference quotient can resolve.
///
/// Only the Hölder family oscillates: on `s = lambda x <= delta` its phase
/// is `s^{-1/beta}`, so one period spans `beta s^{1 + 1/beta} / lambda`.
pub fn resolution(name: &str, x: f64) -> Option<f64> {
    if name != "hoelder" {
        return Some(1.0);
    }
    let (lambda, beta, delta) = (0.2, 0.5, 0.0994);
    let s = lambda * x;
    if s > delta {
        return Some(1.0);
    }
    let period = beta * s.powf(1.0 + 1.0 / beta) / lambda;
    (period >= 1e-6).then_some(period)
}

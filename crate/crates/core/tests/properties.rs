mod common;

use std::sync::LazyLock;

use growthlab::analysis::{self, FitMode};
use growthlab::families::{self, FlowMap};
use growthlab::fixed_points::{self, Stratum};
use growthlab::numeric::diff::{richardson, Stencil};
use growthlab::orbit::{self, GrowthOptions};
use growthlab::par::Execution;
use growthlab::DiffeoSpec;
use proptest::prelude::*;

static SHIPPED: LazyLock<Vec<(&'static str, DiffeoSpec)>> = LazyLock::new(common::shipped);

fn family() -> impl Strategy<Value = usize> {
    0..SHIPPED.len()
}

fn interior() -> impl Strategy<Value = f64> {
    1e-3..(1.0 - 1e-3)
}

fn iterate(spec: &DiffeoSpec, x: f64, n: u64) -> f64 {
    (0..n).fold(x, |y, _| spec.apply(y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn inverse_round_trip(i in family(), x in 0.0f64..=1.0) {
        let spec = &SHIPPED[i].1;
        let y = spec.eval(x).unwrap();
        let back = spec.inverse_eval(y, 1e-12).unwrap();
        prop_assert!((back - x).abs() <= 1e-10, "{}: x={x} back={back}", SHIPPED[i].0);
    }

    #[test]
    fn finite_difference_matches_derivative(i in family(), x in interior()) {
        let (name, spec) = &SHIPPED[i];
        let Some(scale) = common::resolution(name, x) else { return Ok(()) };
        let h = (1e-2 * x.min(1.0 - x).min(0.1)).min(1e-3 * scale);
        let fd = richardson(&|t| spec.apply(t), x, 1, Stencil::Central, h).unwrap();
        let exact = spec.deriv(x, 1).unwrap();
        prop_assert!(((fd - exact) / exact).abs() <= 1e-6, "{}: x={x} fd={fd} exact={exact}", SHIPPED[i].0);
    }

    #[test]
    fn derivative_positive_and_map_increasing(i in family(), x in 0.0f64..1.0, dx in 1e-9f64..1e-2) {
        let spec = &SHIPPED[i].1;
        let x2 = (x + dx).min(1.0);
        prop_assert!(spec.deriv(x, 1).unwrap() > 0.0);
        prop_assert!(spec.apply(x2) > spec.apply(x) || x2 == x);
    }

    #[test]
    fn chain_rule_matches_slope(i in family(), x in 0.02f64..0.98, n in 1u64..=100) {
        let spec = &SHIPPED[i].1;
        let y = iterate(spec, x, n);
        // Near-saturated orbits leave no digits for a difference quotient.
        if y.min(1.0 - y) < 1e-3 {
            return Ok(());
        }
        let (name, _) = &SHIPPED[i];
        let mut scale = 1.0f64;
        let mut t = x;
        for _ in 0..n {
            let Some(r) = common::resolution(name, t) else { return Ok(()) };
            scale = scale.min(r);
            t = spec.apply(t);
        }
        let h = (1e-3 * x.min(1.0 - x)).min(1e-3 * scale);
        let chain = orbit::phi_sum(spec, x, n).unwrap().exp();
        // Same for contractions so strong that `f^n(x +- h)` differ by a few ulps.
        if f64::EPSILON * y / (chain * h) > 1e-6 {
            return Ok(());
        }
        let slope = richardson(&|t| iterate(spec, t, n), x, 1, Stencil::Central, h).unwrap();
        prop_assert!(((slope - chain) / chain).abs() <= 1e-4, "{}: x={x} n={n} slope={slope} chain={chain}", SHIPPED[i].0);
    }

    #[test]
    fn flow_semigroup(x in 0.01f64..0.99, s in 0.0f64..1.0) {
        let spec = common::logistic_flow(1.0);
        let flow = spec.map_as::<FlowMap>().unwrap();
        let split = flow.flow(flow.flow(x, s), 1.0 - s);
        prop_assert!((split - spec.apply(x)).abs() <= 1e-7);
    }

    #[test]
    fn exact_power_data_fits_exactly(slope in 0.5f64..3.0, scale in -2.0f64..2.0) {
        let ns: Vec<u64> = orbit::log_spaced(1000, 100_000, 12);
        let gs: Vec<f64> = ns.iter().map(|&n| scale + slope * (n as f64).ln()).collect();
        let fit = analysis::fit_points(&ns, &gs, FitMode::Power, (1000, 100_000)).unwrap();
        prop_assert!((fit.slope - slope).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&fit.r_squared));
    }

    #[test]
    fn exact_exponential_data_fits_exactly(rate in 0.01f64..2.0) {
        let ns: Vec<u64> = (50..=200).step_by(10).collect();
        let gs: Vec<f64> = ns.iter().map(|&n| rate * n as f64).collect();
        let fit = analysis::fit_points(&ns, &gs, FitMode::ExpRate, (50, 200)).unwrap();
        prop_assert!((fit.slope - rate).abs() <= 1e-12);
    }
}

#[test]
fn displacement_vanishes_at_endpoints() {
    for (name, spec) in SHIPPED.iter() {
        let d = spec.displacement();
        assert_eq!(d.value(0.0), 0.0, "{name}");
        assert_eq!(d.value(1.0), 0.0, "{name}");
    }
}

#[test]
fn every_shipped_family_validates() {
    for (name, spec) in SHIPPED.iter() {
        let report = spec.validate(1001);
        assert!(report.ok() && report.min_derivative > 0.0, "{name}: {report:?}");
    }
}

#[test]
fn growth_brackets_zero_and_is_nonnegative() {
    let cps = [1, 10, 100, 1000];
    for (name, spec) in SHIPPED.iter() {
        let curve = orbit::growth_sequence(spec, 1000, 128, &cps).unwrap();
        for r in &curve.records {
            assert!(r.log_max_fwd >= 0.0 && r.log_min_fwd <= 0.0, "{name}: {r:?}");
            assert!(r.log_gamma >= 0.0, "{name}: {r:?}");
        }
    }
}

#[test]
fn identity_never_grows() {
    let curve = orbit::growth_sequence(&families::identity(), 10_000, 256, &[1, 10, 100, 10_000]).unwrap();
    assert!(curve.records.iter().all(|r| r.log_gamma == 0.0));
}

#[test]
fn sequential_and_parallel_agree_bitwise() {
    let cps = orbit::log_spaced(10, 3000, 8);
    for (name, spec) in SHIPPED.iter() {
        let mut opts = GrowthOptions::with_grid(200);
        opts.execution = Execution::Sequential;
        let seq = orbit::growth_sequence_with(spec, 3000, &cps, &opts).unwrap();
        opts.execution = Execution::Parallel;
        let par = orbit::growth_sequence_with(spec, 3000, &cps, &opts).unwrap();
        assert_eq!(seq, par, "{name}");
    }
}

#[test]
fn reversing_the_translation_keeps_growth() {
    let cps = [10, 100, 1000, 5000];
    let fwd = orbit::growth_sequence(&families::conjugated_translation(1.0), 5000, 1024, &cps).unwrap();
    let bwd = orbit::growth_sequence(&families::conjugated_translation(-1.0), 5000, 1024, &cps).unwrap();
    for (a, b) in fwd.records.iter().zip(&bwd.records) {
        assert!((a.log_gamma - b.log_gamma).abs() <= 1e-3 * a.log_gamma.max(1.0), "{a:?} vs {b:?}");
    }
}

#[test]
fn conjugation_changes_growth_by_a_bounded_amount() {
    let f = families::conjugated_translation(1.0);
    let g = families::hyperbolic(0.5).unwrap();
    let (f2, g2, g3) = (f.clone(), g.clone(), g.clone());
    let conj = DiffeoSpec::custom(
        "g^-1 f g",
        move |x| {
            if x <= 0.0 || x >= 1.0 {
                return 0.0;
            }
            g2.inverse_eval(f2.apply(g2.apply(x)), 1e-15).unwrap() - x
        },
        move |x| {
            let gx = g3.apply(x);
            let fgx = f.apply(gx);
            let h = g3.inverse_eval(fgx, 1e-15).unwrap();
            f.deriv(gx, 1).unwrap() * g3.deriv(x, 1).unwrap() / g3.deriv(h, 1).unwrap() - 1.0
        },
    );
    let cps = orbit::log_spaced(10, 10_000, 8);
    let base = orbit::growth_sequence(&families::conjugated_translation(1.0), 10_000, 128, &cps).unwrap();
    let moved = orbit::growth_sequence(&conj, 10_000, 128, &cps).unwrap();
    for (a, b) in base.records.iter().zip(&moved.records) {
        assert!((a.log_gamma - b.log_gamma).abs() <= 10.0, "n={}: {} vs {}", a.n, a.log_gamma, b.log_gamma);
    }
    let _ = g;
}

#[test]
fn growth_is_at_least_linear_somewhere() {
    let mut short = Vec::new();
    for (name, spec) in common::non_identity() {
        let curve = orbit::growth_sequence(&spec, 100_000, 128, &[100, 1000, 10_000, 100_000]).unwrap();
        let best = curve.records.iter().map(|r| r.log_gamma / (r.n as f64).ln()).fold(f64::MIN, f64::max);
        if best < 0.9 {
            short.push(format!("{name}: max log Γ/log n = {best}"));
        }
    }
    assert!(short.is_empty(), "{short:?}");
}

#[test]
fn flat_families_vanish_to_order_eight() {
    let flat = [("flat_exp", families::flat_exp(0.1).unwrap()), ("bumps", common::bump_instance())];
    for (name, spec) in flat {
        for x in [0.0, 1.0] {
            for order in 1..=8 {
                let d = spec.displacement().deriv_order(x, order).unwrap();
                assert!(d.abs() <= 1e-6, "{name}: order {order} at {x} is {d}");
            }
        }
    }
}

fn strata(spec: &DiffeoSpec, tol: f64) -> Vec<String> {
    let set = fixed_points::find_fixed_points(spec, fixed_points::DEFAULT_GRID, 1e-12);
    set.points
        .iter()
        .filter(|&&p| !set.in_fixed_interval(p))
        .map(|&p| fixed_points::classify_fixed_point(spec, p, 8, tol).unwrap().label())
        .collect()
}

#[test]
fn classification_survives_tolerance_halving() {
    for (name, spec) in SHIPPED.iter() {
        let tol = fixed_points::CLASSIFY_TOL;
        assert_eq!(strata(spec, tol), strata(spec, tol / 2.0), "{name}");
    }
}

#[test]
fn declared_strata() {
    let report = |s: &DiffeoSpec| fixed_points::fixed_point_report(s, fixed_points::DEFAULT_GRID).unwrap();
    let hyp = report(&families::hyperbolic(0.5).unwrap());
    assert!(hyp.points.iter().all(|p| matches!(p.stratum, Stratum::E1 { .. })));
    let poly = report(&families::polynomial_flat(3, 1.0).unwrap());
    assert!(poly.points.iter().all(|p| matches!(p.stratum, Stratum::Ek { k: 3, .. })));
    let conj = report(&families::conjugated_translation(1.0));
    assert!(conj.points.iter().all(|p| matches!(p.stratum, Stratum::Ek { k: 2, .. })));
    let flat = report(&families::flat_exp(0.1).unwrap());
    assert!(flat.points.iter().all(|p| matches!(p.stratum, Stratum::FlatToOrder { m: 8 })));
    let id = report(&families::identity());
    assert!(id.points.iter().all(|p| matches!(p.stratum, Stratum::FixedInterval)));
    assert_eq!(id.fixed_intervals.len(), 1);
}

#[test]
fn asymmetry_constant_is_inverse_invariant() {
    let report = |c: f64| fixed_points::fixed_point_report(&families::conjugated_translation(c), 2000).unwrap().v;
    assert!((report(1.0) - report(-1.0)).abs() <= 1e-9);
    let hyp = |c: f64| fixed_points::fixed_point_report(&families::hyperbolic(c).unwrap(), 2000).unwrap().v;
    assert!((hyp(0.5) - 2f64.ln()).abs() <= 1e-9);
}

#[test]
fn flow_derivative_identity_on_grid() {
    let spec = families::flow_family(&families::flat_exp(0.1).unwrap(), 1.0, 1e-10).unwrap();
    for x in [0.2, 0.3, 0.5, 0.7] {
        for n in [1, 10, 100] {
            let r = analysis::verify_flow_identity(&spec, x, n).unwrap();
            assert!(r.ok(), "x={x} n={n}: {r:?}");
        }
    }
}

#[test]
fn hoelder_seminorm_is_grid_stable() {
    let spec = common::hoelder_instance();
    let coarse = analysis::hoelder_constant_of_derivative(&spec, 0.5, 1000).unwrap();
    let fine = analysis::hoelder_constant_of_derivative(&spec, 0.5, 2000).unwrap();
    assert!(coarse.is_finite() && ((fine - coarse) / coarse).abs() < 0.2, "{coarse} -> {fine}");
}

#[test]
fn pr3_bracket_on_applicable_instances() {
    for (name, spec) in SHIPPED.iter() {
        for x1 in [0.05, 0.1, 0.3] {
            let r = analysis::verify_lemma_pr3(spec, x1, 100).unwrap();
            assert!(!r.applicable || r.pass, "{name} x1={x1}: {r:?}");
        }
    }
}

#[test]
fn almost_convexity_mechanism_on_hoelder() {
    let spec = common::hoelder_instance();
    let cps: Vec<u64> = (1..=2000).collect();
    let mut opts = GrowthOptions::with_grid(512);
    opts.refinement_rounds = 0;
    let curve = orbit::growth_sequence_with(&spec, 2000, &cps, &opts).unwrap();
    let a: Vec<f64> = std::iter::once(0.0).chain(curve.records.iter().map(|r| r.log_max_fwd)).collect();
    let (k, k1) = analysis::fit_convexity_constants(&a, 0.5);
    let r = analysis::check_almost_convexity(&a, k, k1, 0.5);
    assert!(r.pass, "{r:?}");
    assert_eq!(r.details.get("bound_observed"), Some(&1.0), "{r:?}");
}

//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use growthlab::analysis::{self, FitMode};
use growthlab::families::{self, FlatBumpSchedule, FlowMap, HoelderPiece, HoelderSchedule};
use growthlab::fixed_points::{self, Stratum};
use growthlab::numeric::diff::{richardson, Stencil};
use growthlab::orbit::{self, GrowthCurve, GrowthOptions};
use growthlab::{DiffeoSpec, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Every curve computed by the run, for the global nonnegativity check.
#[derive(Default)]
struct Ledger {
    curves: Vec<(String, GrowthCurve)>,
}

impl Ledger {
    fn keep(&mut self, name: &str, curve: &GrowthCurve) {
        self.curves.push((name.to_owned(), curve.clone()));
    }
}

fn default_protocol(spec: &DiffeoSpec) -> Result<GrowthCurve> {
    let cps = orbit::log_spaced(1000, 100_000, 20);
    orbit::growth_sequence_with(spec, 100_000, &cps, &GrowthOptions::with_grid(4096))
}

fn power_slope(ledger: &mut Ledger, name: &str, spec: &DiffeoSpec, lo: f64, hi: f64) -> Result<(bool, String)> {
    let started = Instant::now();
    let curve = default_protocol(spec)?;
    let secs = started.elapsed().as_secs_f64();
    ledger.keep(name, &curve);
    let fit = analysis::fit_exponent(&curve, FitMode::Power, (1000, 100_000))?;
    let pass = fit.slope >= lo && fit.slope <= hi && fit.r_squared >= 0.999 && secs < 120.0;
    Ok((pass, format!("{name}: slope {:.4} in [{lo}, {hi}], R² {:.6}, {secs:.1} s", fit.slope, fit.r_squared)))
}

fn join(parts: Vec<(bool, String)>) -> Outcome {
    let pass = parts.iter().all(|p| p.0);
    Outcome::new(pass, parts.into_iter().map(|p| p.1).collect::<Vec<_>>().join("; "))
}

fn criterion_1(ledger: &mut Ledger) -> Result<Outcome> {
    Ok(join(vec![
        power_slope(ledger, "polynomial_flat(2,1)", &families::polynomial_flat(2, 1.0)?, 1.9, 2.1)?,
        power_slope(ledger, "conjugated_translation(1)", &families::conjugated_translation(1.0), 1.9, 2.1)?,
    ]))
}

fn criterion_2(ledger: &mut Ledger) -> Result<Outcome> {
    let c3 = 0.5 * families::polynomial_c_max(3);
    let c4 = 0.5 * families::polynomial_c_max(4);
    Ok(join(vec![
        power_slope(ledger, "polynomial_flat(3)", &families::polynomial_flat(3, c3)?, 1.4, 1.6)?,
        power_slope(ledger, "polynomial_flat(4)", &families::polynomial_flat(4, c4)?, 1.23, 1.43)?,
    ]))
}

fn criterion_3(ledger: &mut Ledger) -> Result<Outcome> {
    let started = Instant::now();
    let spec = families::hyperbolic(0.5)?;
    let cps: Vec<u64> = (50..=200).step_by(10).collect();
    let curve = orbit::growth_sequence(&spec, 200, 4096, &cps)?;
    let fit = analysis::fit_exponent(&curve, FitMode::ExpRate, (50, 200))?;
    let secs = started.elapsed().as_secs_f64();
    ledger.keep("hyperbolic(0.5)", &curve);
    let rel = fit.slope / 2f64.ln() - 1.0;
    Ok(Outcome::new(rel.abs() <= 0.05 && secs < 10.0, format!("rate {:.6} vs log 2, rel {rel:+.2e}, {secs:.2} s", fit.slope)))
}

fn criterion_4(ledger: &mut Ledger) -> Result<Outcome> {
    let spec = families::conjugated_translation(1.0);
    let cps = orbit::log_spaced(10, 10_000, 10);
    let curve = orbit::growth_sequence(&spec, 10_000, 4096, &cps)?;
    ledger.keep("conjugated_translation(1) oracle", &curve);
    let grid = orbit::start_grid(&spec, 4096);
    let mut worst = 0.0f64;
    for r in &curve.records {
        // Same starts the engine saw, plus the points its refinement settled on.
        let starts = grid.iter().copied().chain([r.argmax_start, r.argmin_start]);
        let (mut hi, mut lo) = (f64::MIN, f64::MAX);
        for x in starts {
            let phi = orbit::closed_form_phi(&spec, x, r.n).expect("closed-form iterate");
            hi = hi.max(phi);
            lo = lo.min(phi);
        }
        worst = worst.max((hi.max(-lo) - r.log_gamma).abs());
    }
    Ok(Outcome::new(worst <= 1e-6, format!("max |engine - closed form| = {worst:.3e} over n <= 10^4")))
}

fn criterion_5() -> Result<Outcome> {
    let big_n = 50u32;
    let mut parts = Vec::new();
    for beta in [0.5, 1.0, 2.0] {
        let spec = families::bar_phi_map(0.3, beta)?;
        let exact = |k: u32| f64::from(big_n + 1 - k).powf(-beta);
        let worst = (1..big_n).map(|k| (spec.apply(exact(k)) / exact(k + 1) - 1.0).abs()).fold(0.0, f64::max);
        parts.push((worst < 1e-9, format!("beta {beta}: {worst:.2e}")));
    }
    Ok(join(parts))
}

fn criterion_6() -> Result<Outcome> {
    let eq39 = analysis::verify_eq39(0.3, 0.5, 10_000)?;
    let eq741 = analysis::verify_eq741(0.3, 0.5, 1000)?;
    Ok(join(vec![
        (eq39.ok(), format!("sum/asymptotic at N=10^4 = {:.4} (need within 15%)", eq39.measured)),
        (eq741.ok(), format!("derivative ratio at k=10^3 = {:.4} (need within 5%)", eq741.measured)),
    ]))
}

fn criterion_7(ledger: &mut Ledger) -> Result<Outcome> {
    let schedule = FlatBumpSchedule::default_with(families::DEFAULT_BUMPS);
    let spec = families::flat_bump_thm2(&schedule)?;
    let (n1, n4) = (schedule.entries[0].n_k, schedule.entries[3].n_k);
    let mut cps = orbit::log_spaced(n1, n4, 12);
    cps.extend(schedule.entries.iter().map(|e| e.n_k));
    cps.sort_unstable();
    cps.dedup();
    let curve = orbit::growth_sequence(&spec, n4, 256, &cps)?;
    ledger.keep("flat_bump_thm2", &curve);
    let mut worst = f64::INFINITY;
    let mut worst_n = 0;
    for r in &curve.records {
        let n = r.n as f64;
        let margin = r.log_gamma - (schedule.epsilon(r.n) * n * n).ln();
        if margin < worst {
            worst = margin;
            worst_n = r.n;
        }
    }
    let report = fixed_points::fixed_point_report(&spec, fixed_points::DEFAULT_GRID)?;
    let locations: Vec<f64> = report.points.iter().map(|p| p.location).collect();
    let flat = report.points.iter().all(|p| matches!(p.stratum, Stratum::FlatToOrder { m: 8 }));
    let strata_ok = locations == [0.0, 1.0] && flat && report.fixed_intervals.is_empty();
    Ok(join(vec![
        (worst >= 0.0, format!("min log Γ_n - log(eps_n n²) = {worst:.3} at n = {worst_n}")),
        (strata_ok, format!("fixed points {locations:?}, all FlatToOrder(8): {flat}")),
    ]))
}

fn hoelder_instance() -> Result<DiffeoSpec> {
    let schedule = HoelderSchedule::new(0.5, vec![HoelderPiece { beta: 0.5, a: 0.0, b: 1.0, scale: 0.2 }])?;
    families::hoelder_thm3b(&schedule)
}

fn criterion_8(ledger: &mut Ledger) -> Result<Outcome> {
    let spec = hoelder_instance()?;
    let curve = default_protocol(&spec)?;
    ledger.keep("hoelder_thm3b", &curve);
    let scaled: Vec<f64> = curve.records.iter().map(|r| r.log_gamma / (r.n as f64).sqrt()).collect();
    let window = 5;
    let first = scaled[..window].iter().sum::<f64>() / window as f64;
    let last = scaled[scaled.len() - window..].iter().sum::<f64>() / window as f64;
    let fit = analysis::fit_exponent(&curve, FitMode::Loglog, (1000, 100_000))?;
    Ok(join(vec![
        (last <= first, format!("log Γ_n/n^0.5 window means {first:.4} -> {last:.4}")),
        (fit.slope >= 0.15 && fit.slope <= 0.60, format!("loglog slope {:.4} in [0.15, 0.60]", fit.slope)),
    ]))
}

fn criterion_9() -> Result<Outcome> {
    let t = 2f64.ln();
    let logistic = families::flow_family(&families::hyperbolic_unchecked(1.0), t, 1e-12)?;
    let et = t.exp();
    let mut analytic = 0.0f64;
    for i in 1..100 {
        let x = f64::from(i) / 100.0;
        let denom = 1.0 + x * (et - 1.0);
        analytic = analytic.max((logistic.apply(x) - x * et / denom).abs());
        let d = logistic.deriv(x, 1)?;
        analytic = analytic.max((d / (et / (denom * denom)) - 1.0).abs());
    }

    let flat = families::flow_family(&families::flat_exp(0.1)?, 1.0, 1e-10)?;
    let mut identity = 0.0f64;
    let mut identity_ok = true;
    for x in [0.1, 0.2, 0.3, 0.5, 0.7, 0.9] {
        for n in [1, 10, 100] {
            let r = analysis::verify_flow_identity(&flat, x, n)?;
            if r.applicable {
                identity = identity.max(r.measured);
                identity_ok &= r.pass;
            }
        }
    }

    let mut semigroup = 0.0f64;
    for spec in [&logistic, &flat] {
        let flow = spec.map_as::<FlowMap>().expect("flow map");
        for i in 1..=100 {
            let x = f64::from(i) / 101.0;
            let split = flow.flow(flow.flow(x, 0.3), 0.7);
            semigroup = semigroup.max((split - flow.flow(x, 1.0)).abs());
        }
    }
    Ok(join(vec![
        (analytic <= 1e-7, format!("logistic closed form {analytic:.2e}")),
        (identity_ok && identity <= 1e-6, format!("flat_exp flow identity {identity:.2e}")),
        (semigroup <= 1e-7, format!("semigroup {semigroup:.2e}")),
    ]))
}

fn criterion_10() -> Result<Outcome> {
    let shipped: Vec<(&str, DiffeoSpec)> = vec![
        ("hyperbolic", families::hyperbolic(0.5)?),
        ("polynomial2", families::polynomial_flat(2, 1.0)?),
        ("conjugated(0.1)", families::conjugated_translation(0.1)),
        ("conjugated(1)", families::conjugated_translation(1.0)),
        ("flat_exp", families::flat_exp(0.1)?),
    ];
    let mut applicable = 0;
    let mut pr3_ok = true;
    for (_, spec) in &shipped {
        for x1 in [0.05, 0.1, 0.2, 0.3] {
            let r = analysis::verify_lemma_pr3(spec, x1, 100)?;
            if r.applicable {
                applicable += 1;
                pr3_ok &= r.pass;
            }
        }
    }
    let conj = families::conjugated_translation(1.0);
    let pr1 = analysis::verify_lemma_pr1_ladder(&conj, (0.0, 1.0), 0.01, &[100, 1000, 10_000])?;
    // Wandering interval of half a step inside the oscillating zone of the
    // Hölder family, the class the oscillation bound is about.
    let hoelder = hoelder_instance()?;
    let x0 = 0.1;
    let l4 = analysis::verify_lemma_l4(&hoelder, (x0, x0 + 0.5 * hoelder.displacement().value(x0)), 10_000, 64, 0.5)?;
    let xs: Vec<f64> = (3..=20).map(|j| 0.5f64.powi(j)).collect();
    let prn = analysis::verify_bounded_oscillation_ladder(&families::flat_exp(0.1)?, 2, &xs)?;
    let stable = analysis::verify_lemma_l6(0.5, 1.0, 1.0, 1000)?;
    let unstable = analysis::verify_lemma_l6(0.5, 1.0, 0.5, 1000)?;
    Ok(join(vec![
        (pr3_ok && applicable > 0, format!("pr3 on {applicable} applicable instances")),
        (pr1.ok(), format!("pr1 spread {:.3}", pr1.measured)),
        (l4.ok(), format!("l4 spread {:.3}", l4.measured)),
        (prn.ok(), format!("prn max ratio {:.3}", prn.measured)),
        (stable.ok(), format!("l6 change at b=(p+1)a {:+.3}", stable.measured)),
        (unstable.ok(), format!("l6 growth at b=(p+1)a/2 {:+.3}", unstable.measured)),
    ]))
}

fn criterion_11(ledger: &mut Ledger) -> Result<Outcome> {
    let spec = families::flat_exp(0.1)?;
    let cps = orbit::log_spaced(100, 100_000, 31);
    let curve = orbit::growth_sequence(&spec, 100_000, 1024, &cps)?;
    ledger.keep("flat_exp(0.1)", &curve);
    let early = analysis::fit_exponent(&curve, FitMode::Power, (100, 1000))?;
    let late = analysis::fit_exponent(&curve, FitMode::Power, (10_000, 100_000))?;
    let pass = late.slope <= 1.5 && late.slope < early.slope;
    Ok(Outcome::new(pass, format!("slope {:.4} on [1e2,1e3], {:.4} on [1e4,1e5]", early.slope, late.slope)))
}

fn byte_determinism() -> (bool, String) {
    let dir = std::env::temp_dir().join(format!("growthlab-acceptance-{}", std::process::id()));
    let _ = std::fs::create_dir_all(&dir);
    let cfg = dir.join("poly.json");
    let text = r#"{"family": {"kind": "polynomial-flat", "k": 2, "c": 1.0}, "n_max": 5000, "checkpoints": "logspaced:10", "grid_size": 1024}"#;
    if std::fs::write(&cfg, text).is_err() {
        return (false, "cannot write config".into());
    }
    let max = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut outputs = Vec::new();
    for workers in [1, 2, max] {
        let out = Command::new(env!("CARGO_BIN_EXE_growthlab"))
            .args(["growth", "--config"])
            .arg(&cfg)
            .env("GROWTHLAB_WORKERS", workers.to_string())
            .output();
        match out {
            Ok(o) if o.status.success() => outputs.push(o.stdout),
            _ => return (false, format!("growth failed with {workers} workers")),
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    (same, format!("CSV identical under 1, 2, {max} workers: {same}"))
}

fn criterion_12(ledger: &mut Ledger) -> Result<Outcome> {
    let identity = orbit::growth_sequence(&families::identity(), 10_000, 1024, &orbit::log_spaced(1, 10_000, 10))?;
    ledger.keep("identity", &identity);
    let flat = identity.records.iter().all(|r| r.log_gamma == 0.0);

    let negative: Vec<&str> =
        ledger.curves.iter().filter(|(_, c)| c.records.iter().any(|r| r.log_gamma.is_nan() || r.log_gamma < 0.0)).map(|(n, _)| n.as_str()).collect();

    let specs = [
        families::hyperbolic(0.5)?,
        families::polynomial_flat(2, 1.0)?,
        families::conjugated_translation(1.0),
        families::flat_exp(0.1)?,
    ];
    let mut chain = 0.0f64;
    for spec in &specs {
        for x in [0.1, 0.3, 0.5, 0.7] {
            for n in [1u64, 10, 50, 100] {
                let iterate = |t: f64| (0..n).fold(t, |y, _| spec.apply(y));
                let y = iterate(x);
                if y.min(1.0 - y) < 1e-3 {
                    continue;
                }
                let slope = richardson(&iterate, x, 1, Stencil::Central, 1e-3 * x.min(1.0 - x))?;
                let exact = orbit::phi_sum(spec, x, n)?.exp();
                chain = chain.max((slope / exact - 1.0).abs());
            }
        }
    }
    let (det_ok, det) = byte_determinism();
    Ok(join(vec![
        (flat, "identity Γ_n = 1".into()),
        (negative.is_empty(), format!("log_gamma >= 0 on {} curves {negative:?}", ledger.curves.len())),
        (det_ok, det),
        (chain <= 1e-4, format!("chain rule vs slope {chain:.2e}")),
    ]))
}

fn main() -> ExitCode {
    let mut ledger = Ledger::default();
    type Criterion<'a> = Box<dyn FnMut(&mut Ledger) -> Result<Outcome> + 'a>;
    let criteria: Vec<(&str, Criterion)> = vec![
        ("1 quadratic growth at parabolic points", Box::new(criterion_1)),
        ("2 growth n^{k/(k-1)} at order-k points", Box::new(criterion_2)),
        ("3 hyperbolic rate log 2", Box::new(criterion_3)),
        ("4 engine vs closed-form iterate", Box::new(criterion_4)),
        ("5 exact lattice orbit", Box::new(|_: &mut Ledger| criterion_5())),
        ("6 distortion sum asymptotics", Box::new(|_: &mut Ledger| criterion_6())),
        ("7 flat bumps beat eps_n n²", Box::new(criterion_7)),
        ("8 Hölder family sub-power growth", Box::new(criterion_8)),
        ("9 flow identities", Box::new(|_: &mut Ledger| criterion_9())),
        ("10 lemma suite", Box::new(|_: &mut Ledger| criterion_10())),
        ("11 flat_exp one-sided slope", Box::new(criterion_11)),
        ("12 global properties", Box::new(criterion_12)),
    ];
    let only: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (name, mut run) in criteria {
        let id = name.split_whitespace().next().unwrap_or_default();
        if only.as_deref().is_some_and(|o| o != id) {
            continue;
        }
        let started = Instant::now();
        let outcome = run(&mut ledger).unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        if !outcome.pass {
            failed += 1;
        }
        println!("{tag} {name} [{:.1} s]: {}", started.elapsed().as_secs_f64(), outcome.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

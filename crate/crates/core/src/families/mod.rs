//! Constructors for the shipped families of interval diffeomorphisms.
//!
//! | family | fixed points | strata |
//! |---|---|---|
//! | `identity` | all of `[0, 1]` | fixed interval |
//! | `hyperbolic(c)` | `0, 1` | E1 at both |
//! | `polynomial_flat(k, c)` | `0, 1` | Ek at both |
//! | `conjugated_translation(c)` | `0, 1` | E2 at both |
//! | `flat_bump_thm2` | `0, 1` | flat at both |
//! | `hoelder_thm3b` | complement of the open pieces | finite order at `a_k`, flat at `b_k` |
//! | `flat_exp(c)` | `0, 1` | flat at both |
//! | `flow_family` | those of the base | those of the base |

mod bumps;
mod conjugated;
mod descriptor;
mod elementary;
mod flow;
mod hoelder;

pub use bumps::{default_epsilon, BumpEntry, FlatBumpMap, FlatBumpSchedule, RateCondition, DEFAULT_BUMPS, DEFAULT_C_FILL};
pub use conjugated::{psi, psi_deriv, psi_inverse, ConjugatedTranslationMap};
pub use descriptor::{FamilyDescriptor, HoelderPieceDescriptor};
pub use elementary::{polynomial_c_max, FlatExpMap, HyperbolicMap, IdentityMap, PolynomialFlatMap};
pub use flow::FlowMap;
pub use hoelder::{
    bar_phi_constant, bar_phi_deriv_raw, bar_phi_raw, hoelder_bar_phi, hoelder_bar_phi_deriv, locate_delta, BarPhiMap,
    HoelderMap, HoelderPiece, HoelderSchedule,
};

use crate::diffeo::{DiffeoSpec, FamilyKind};
use crate::error::{Error, Result};

/// Probe count used when a constructor checks monotonicity.
const CONSTRUCTION_PROBES: usize = 20_001;

/// Dyadic seeds `2^{-j}` and `1 - 2^{-j}`, `j = 2..=30`.
fn dyadic_seeds() -> Vec<f64> {
    (2..=30).flat_map(|j| {
        let t = 0.5f64.powi(j);
        [t, 1.0 - t]
    })
    .collect()
}

fn require_valid(spec: DiffeoSpec, what: &str) -> Result<DiffeoSpec> {
    let r = spec.validate(CONSTRUCTION_PROBES);
    if !r.ok() {
        return Err(Error::InvalidParameter(format!(
            "{what} is not a diffeomorphism: min f' = {:e} at x = {}",
            r.min_derivative, r.min_derivative_at
        )));
    }
    Ok(spec)
}

pub fn identity() -> DiffeoSpec {
    DiffeoSpec::from_map(FamilyKind::Identity, IdentityMap).with_descriptor(FamilyDescriptor::Identity)
}

/// `f(x) = x + c x (1 - x)`, `|c| < 1`.
pub fn hyperbolic(c: f64) -> Result<DiffeoSpec> {
    if !(c.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("hyperbolic family needs |c| < 1, got {c}")));
    }
    Ok(hyperbolic_unchecked(c))
}

/// [`hyperbolic`] without the parameter check.
pub fn hyperbolic_unchecked(c: f64) -> DiffeoSpec {
    DiffeoSpec::from_map(FamilyKind::Hyperbolic, HyperbolicMap { c })
        .with_descriptor(FamilyDescriptor::Hyperbolic { c })
        .with_seeds(dyadic_seeds())
}

/// `f(x) = x + c (x (1 - x))^k`, `k >= 2`, `0 < c < c_max(k)`.
pub fn polynomial_flat(k: u32, c: f64) -> Result<DiffeoSpec> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    let c_max = polynomial_c_max(k);
    if !(c > 0.0 && c < c_max) {
        return Err(Error::InvalidParameter(format!("c must lie in (0, {c_max}) for k = {k}, got {c}")));
    }
    Ok(polynomial_flat_unchecked(k, c))
}

pub fn polynomial_flat_unchecked(k: u32, c: f64) -> DiffeoSpec {
    DiffeoSpec::from_map(FamilyKind::PolynomialFlat, PolynomialFlatMap::new(k, c))
        .with_descriptor(FamilyDescriptor::PolynomialFlat { k, c: Some(c), c_fraction: None })
        .with_seeds(dyadic_seeds())
}

/// `f = psi^{-1}(psi + c)` with `psi(x) = (2x - 1) / (x (1 - x))`; carries
/// closed-form iterates.
pub fn conjugated_translation(c: f64) -> DiffeoSpec {
    DiffeoSpec::from_map(FamilyKind::ConjugatedTranslation, ConjugatedTranslationMap { c })
        .with_descriptor(FamilyDescriptor::ConjugatedTranslation { c })
        .with_seeds(dyadic_seeds())
}

/// Parked parabolic bumps over a flat positive filler.
///
/// Only structural conditions and `n_k >= 3/(gamma_k w_k)` are enforced;
/// the rate condition is reported by [`FlatBumpSchedule::rate_conditions`].
pub fn flat_bump_thm2(schedule: &FlatBumpSchedule) -> Result<DiffeoSpec> {
    schedule.check()?;
    let spec = DiffeoSpec::from_map(FamilyKind::FlatBumpThm2, FlatBumpMap::new(schedule))
        .with_descriptor(FamilyDescriptor::FlatBumpThm2 { bumps: schedule.len(), c_fill: Some(schedule.c_fill) })
        .with_seeds(schedule.seeds());
    require_valid(spec, "flat bump map")
}

/// Rescaled truncated `bar_phi` pieces; identity off the pieces.
pub fn hoelder_thm3b(schedule: &HoelderSchedule) -> Result<DiffeoSpec> {
    let map = HoelderMap::new(schedule)?;
    let mut seeds = Vec::new();
    for p in &schedule.pieces {
        for n in [1e2f64, 1e3, 1e4] {
            let s = n.powf(-p.beta);
            if s < p.scale {
                seeds.push(p.a + (p.b - p.a) / p.scale * s);
            }
        }
    }
    let spec = DiffeoSpec::from_map(FamilyKind::HoelderThm3b, map)
        .with_descriptor(FamilyDescriptor::HoelderThm3b {
            alpha: schedule.alpha,
            pieces: schedule
                .pieces
                .iter()
                .map(|p| HoelderPieceDescriptor { beta: p.beta, a: p.a, b: p.b, scale: Some(p.scale) })
                .collect(),
        })
        .with_seeds(seeds);
    let r = spec.validate(CONSTRUCTION_PROBES);
    if !r.ok() {
        return Err(Error::Construction(format!(
            "assembled map is not monotone: min f' = {:e} at x = {}",
            r.min_derivative, r.min_derivative_at
        )));
    }
    Ok(spec)
}

/// `x + bar_phi(x)`; exact on the lattice `j^{-beta}`, not a diffeomorphism.
pub fn bar_phi_map(alpha: f64, beta: f64) -> Result<DiffeoSpec> {
    hoelder_bar_phi(alpha, beta, 0.5)?;
    Ok(DiffeoSpec::from_map(FamilyKind::CustomClosure, BarPhiMap { alpha, beta })
        .with_descriptor(FamilyDescriptor::BarPhi { alpha, beta }))
}

/// `f(x) = x + c exp(-1/(x (1 - x)))`, `c >= 0`.
pub fn flat_exp(c: f64) -> Result<DiffeoSpec> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("c must be finite and nonnegative, got {c}")));
    }
    require_valid(flat_exp_unchecked(c), "flat exponential map")
}

pub fn flat_exp_unchecked(c: f64) -> DiffeoSpec {
    DiffeoSpec::from_map(FamilyKind::FlatExp, FlatExpMap { c })
        .with_descriptor(FamilyDescriptor::FlatExp { c })
        .with_seeds(dyadic_seeds())
}

/// Time-`t` map of the flow of the base displacement.
pub fn flow_family(base: &DiffeoSpec, t: f64, step_tol: f64) -> Result<DiffeoSpec> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("flow time must be finite and nonnegative, got {t}")));
    }
    if !(step_tol > 0.0) {
        return Err(Error::InvalidParameter(format!("step tolerance must be positive, got {step_tol}")));
    }
    let phi = base.displacement();
    for i in 1..1000 {
        let x = i as f64 / 1000.0;
        if phi.value(x) < 0.0 || phi.is_zero(x) {
            return Err(Error::InvalidParameter(format!(
                "flow base must have positive displacement on (0, 1); phi({x}) = {:e}",
                phi.value(x)
            )));
        }
    }
    let map = FlowMap { base: base.clone(), t, step_tol };
    for i in 0..=32 {
        map.try_flow(i as f64 / 32.0, t)?;
    }
    let seeds = base.suggested_seeds().to_vec();
    let descriptor = base.descriptor().map(|d| FamilyDescriptor::Flow { base: Box::new(d.clone()), t, step_tol });
    let mut spec = DiffeoSpec::from_map(FamilyKind::Flow, map).with_seeds(seeds);
    if let Some(d) = descriptor {
        spec = spec.with_descriptor(d);
    }
    Ok(spec)
}

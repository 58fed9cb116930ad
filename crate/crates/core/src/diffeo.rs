//! Endpoint-fixing diffeomorphisms of `[0, 1]`: representation, evaluation,
//! differentiation, inversion and validation.

use std::any::Any;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FamilyDescriptor;
use crate::numeric::diff::{self, Stencil};
use crate::numeric::roots;

/// Absolute tolerance for endpoint fixing and orbit clamping.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Probe count behind [`DiffeoSpec::is_valid`].
pub const DEFAULT_VALIDATION_PROBES: usize = 1001;

/// A concrete map `f(x) = x + phi(x)` on `[0, 1]`.
///
/// Implementors supply the displacement `phi` and its analytic derivative.
/// The remaining methods have defaults written in terms of those two; maps
/// override them when a formula with better cancellation behaviour exists
/// (e.g. `log f'` straight from a conjugacy, or `log phi` for flat maps
/// whose displacement underflows).
pub trait IntervalMap: Any + Send + Sync + fmt::Debug {
    fn displacement(&self, x: f64) -> f64;

    fn displacement_deriv(&self, x: f64) -> f64;

    #[inline]
    fn apply(&self, x: f64) -> f64 {
        x + self.displacement(x)
    }

    #[inline]
    fn derivative(&self, x: f64) -> f64 {
        1.0 + self.displacement_deriv(x)
    }

    #[inline]
    fn log_derivative(&self, x: f64) -> f64 {
        self.displacement_deriv(x).ln_1p()
    }

    /// `(f(x), log f'(x))`, the orbit engine's inner step.
    #[inline]
    fn step(&self, x: f64) -> (f64, f64) {
        (self.apply(x), self.log_derivative(x))
    }

    /// `log |phi(x)|`.
    fn log_displacement(&self, x: f64) -> f64 {
        self.displacement(x).abs().ln()
    }

    /// Whether `x` is a fixed point in exact arithmetic.
    fn is_fixed(&self, x: f64) -> bool {
        self.displacement(x) == 0.0
    }

    /// Closed-form `phi^(order)(x)` for `order >= 2`, when the family has one.
    fn displacement_higher_deriv(&self, _x: f64, _order: u32) -> Option<f64> {
        None
    }

    /// Closed-form `(f^n(x), log (f^n)'(x))`, when the family has one.
    fn closed_iterate(&self, _x: f64, _n: f64) -> Option<(f64, f64)> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Identity,
    Hyperbolic,
    PolynomialFlat,
    ConjugatedTranslation,
    FlatBumpThm2,
    HoelderThm3b,
    FlatExp,
    Flow,
    CustomClosure,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyKind::Identity => "identity",
            FamilyKind::Hyperbolic => "hyperbolic",
            FamilyKind::PolynomialFlat => "polynomial-flat",
            FamilyKind::ConjugatedTranslation => "conjugated-translation",
            FamilyKind::FlatBumpThm2 => "flat-bump-thm2",
            FamilyKind::HoelderThm3b => "hoelder-thm3b",
            FamilyKind::FlatExp => "flat-exp",
            FamilyKind::Flow => "flow",
            FamilyKind::CustomClosure => "custom-closure",
        };
        f.write_str(s)
    }
}

/// A diffeomorphism of `[0, 1]` together with its family metadata.
///
/// Cheap to clone; the underlying map is shared and immutable.
#[derive(Clone)]
pub struct DiffeoSpec {
    kind: FamilyKind,
    descriptor: Option<FamilyDescriptor>,
    domain: (f64, f64),
    suggested_seeds: Vec<f64>,
    map: Arc<dyn IntervalMap>,
    validity: Arc<OnceLock<ValidationReport>>,
}

impl fmt::Debug for DiffeoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffeoSpec")
            .field("kind", &self.kind)
            .field("descriptor", &self.descriptor)
            .field("seeds", &self.suggested_seeds.len())
            .field("map", &self.map)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub monotone_ok: bool,
    pub endpoints_ok: bool,
    pub min_derivative: f64,
    pub max_derivative: f64,
    pub min_derivative_at: f64,
    pub probe_count: usize,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.monotone_ok && self.endpoints_ok
    }
}

struct ClosureMap<P, D> {
    name: String,
    phi: P,
    dphi: D,
}

impl<P, D> fmt::Debug for ClosureMap<P, D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClosureMap({})", self.name)
    }
}

impl<P, D> IntervalMap for ClosureMap<P, D>
where
    P: Fn(f64) -> f64 + Send + Sync + 'static,
    D: Fn(f64) -> f64 + Send + Sync + 'static,
{
    fn displacement(&self, x: f64) -> f64 {
        (self.phi)(x)
    }
    fn displacement_deriv(&self, x: f64) -> f64 {
        (self.dphi)(x)
    }
}

impl DiffeoSpec {
    pub fn from_map<M: IntervalMap>(kind: FamilyKind, map: M) -> Self {
        Self {
            kind,
            descriptor: None,
            domain: (0.0, 1.0),
            suggested_seeds: Vec::new(),
            map: Arc::new(map),
            validity: Arc::new(OnceLock::new()),
        }
    }

    /// Map given by a displacement closure and its derivative.
    pub fn custom<P, D>(name: impl Into<String>, phi: P, dphi: D) -> Self
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_map(FamilyKind::CustomClosure, ClosureMap { name: name.into(), phi, dphi })
    }

    pub fn with_descriptor(mut self, descriptor: FamilyDescriptor) -> Self {
        self.descriptor = Some(descriptor);
        self
    }

    pub fn with_seeds(mut self, seeds: Vec<f64>) -> Self {
        self.suggested_seeds = seeds.into_iter().filter(|s| *s > 0.0 && *s < 1.0).collect();
        self
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn descriptor(&self) -> Option<&FamilyDescriptor> {
        self.descriptor.as_ref()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn suggested_seeds(&self) -> &[f64] {
        &self.suggested_seeds
    }

    pub fn map(&self) -> &dyn IntervalMap {
        &*self.map
    }

    /// Downcast of the underlying map.
    pub fn map_as<M: IntervalMap>(&self) -> Option<&M> {
        let any: &dyn Any = &*self.map;
        any.downcast_ref::<M>()
    }

    pub fn displacement(&self) -> Displacement<'_> {
        Displacement { spec: self }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        let (lo, hi) = self.domain;
        if x >= lo && x <= hi {
            Ok(())
        } else {
            Err(Error::Domain { x, lo, hi })
        }
    }

    /// `f(x)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.map.apply(x))
    }

    /// Unchecked `f(x)` for hot loops.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        self.map.apply(x)
    }

    #[inline]
    pub fn log_derivative(&self, x: f64) -> f64 {
        self.map.log_derivative(x)
    }

    /// `f^(order)(x)`. Order 1 always comes from the analytic derivative;
    /// higher orders use the family formula when present and Richardson
    /// differences of the displacement otherwise (one-sided at `0` and `1`).
    pub fn deriv(&self, x: f64, order: u32) -> Result<f64> {
        self.check_domain(x)?;
        if order == 0 {
            return Err(Error::Argument("derivative order must be positive".into()));
        }
        if order == 1 {
            return Ok(self.map.derivative(x));
        }
        if let Some(v) = self.map.displacement_higher_deriv(x, order) {
            return Ok(v);
        }
        if order > diff::MAX_ORDER {
            return Err(Error::Precision(format!(
                "order {order} exceeds the finite-difference cap {}",
                diff::MAX_ORDER
            )));
        }
        let (lo, hi) = self.domain;
        let phi = |t: f64| self.map.displacement(t);
        if x == lo {
            diff::richardson(&phi, x, order, Stencil::Forward, diff::ENDPOINT_STEP)
        } else if x == hi {
            diff::richardson(&phi, x, order, Stencil::Backward, diff::ENDPOINT_STEP)
        } else {
            let h = diff::central_step(x, lo, hi, order);
            diff::richardson(&phi, x, order, Stencil::Central, h)
        }
    }

    /// `f^{-1}(y)` by bisection within `tol` in the image.
    pub fn inverse_eval(&self, y: f64, tol: f64) -> Result<f64> {
        self.check_domain(y)?;
        if !(tol > 0.0) {
            return Err(Error::Argument(format!("tolerance must be positive, got {tol}")));
        }
        if !self.is_valid() {
            return Err(Error::InvalidSpec(format!("{} map failed validation; not invertible", self.kind)));
        }
        let (lo, hi) = self.domain;
        if y == lo || y == hi {
            return Ok(y);
        }
        let (x, residual) = roots::bisect_increasing(|t| self.map.apply(t), y, lo, hi, tol);
        // A collapsed bracket is the best double precision can do.
        if residual > tol && residual > 4.0 * f64::EPSILON * y.abs().max(1e-300) {
            return Err(Error::Precision(format!(
                "inverse at y={y} stalled with residual {residual:e} > {tol:e}"
            )));
        }
        Ok(x)
    }

    /// Endpoint, monotonicity and derivative-sign check on a uniform grid.
    pub fn validate(&self, probe_count: usize) -> ValidationReport {
        let probes = probe_count.max(2);
        let (lo, hi) = self.domain;
        let endpoints_ok =
            (self.map.apply(lo) - lo).abs() <= BOUNDARY_TOL && (self.map.apply(hi) - hi).abs() <= BOUNDARY_TOL;
        let mut increasing = true;
        let mut min_d = f64::INFINITY;
        let mut max_d = f64::NEG_INFINITY;
        let mut min_at = lo;
        let mut prev = f64::NEG_INFINITY;
        for i in 0..probes {
            let x = lo + (hi - lo) * i as f64 / (probes - 1) as f64;
            let fx = self.map.apply(x);
            if !(fx > prev) {
                increasing = false;
            }
            prev = fx;
            let d = self.map.derivative(x);
            if d < min_d || d.is_nan() {
                min_d = d;
                min_at = x;
            }
            if d > max_d {
                max_d = d;
            }
        }
        ValidationReport {
            monotone_ok: increasing && min_d > 0.0,
            endpoints_ok,
            min_derivative: min_d,
            max_derivative: max_d,
            min_derivative_at: min_at,
            probe_count: probes,
        }
    }

    /// Cached validation on [`DEFAULT_VALIDATION_PROBES`] probes.
    pub fn is_valid(&self) -> bool {
        self.validity.get_or_init(|| self.validate(DEFAULT_VALIDATION_PROBES)).ok()
    }
}

/// The displacement `phi(x) = f(x) - x` of a spec.
#[derive(Debug, Clone, Copy)]
pub struct Displacement<'a> {
    spec: &'a DiffeoSpec,
}

impl Displacement<'_> {
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.spec.map.displacement(x)
    }

    #[inline]
    pub fn deriv(&self, x: f64) -> f64 {
        self.spec.map.displacement_deriv(x)
    }

    /// `phi^(order)`; identical to `f^(order)` for `order >= 2`.
    pub fn deriv_order(&self, x: f64, order: u32) -> Result<f64> {
        match order {
            0 => Ok(self.value(x)),
            1 => Ok(self.deriv(x)),
            _ => self.spec.deriv(x, order),
        }
    }

    #[inline]
    pub fn log_abs(&self, x: f64) -> f64 {
        self.spec.map.log_displacement(x)
    }

    #[inline]
    pub fn is_zero(&self, x: f64) -> bool {
        self.spec.map.is_fixed(x)
    }
}

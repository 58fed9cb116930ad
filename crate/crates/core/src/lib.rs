//! Growth sequences of iterated diffeomorphisms of `[0, 1]`.
//!
//! The crate builds endpoint-fixing interval maps, iterates them, and
//! measures `log Γ_n`, the largest log-derivative of the `n`-th forward or
//! backward iterate. Around that sit fixed-point classification, exponent
//! fits and a set of numerical checks of distortion estimates.
//!
//! ```
//! use growthlab::{families, orbit};
//!
//! let f = families::hyperbolic(0.5).unwrap();
//! let curve = orbit::growth_sequence(&f, 100, 64, &[10, 100]).unwrap();
//! let rate = curve.records[1].log_gamma / 100.0;
//! assert!((rate / 2f64.ln() - 1.0).abs() < 0.05);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod diffeo;
pub mod error;
pub mod families;
pub mod fixed_points;
pub mod numeric;
pub mod orbit;
pub mod par;

pub use diffeo::{DiffeoSpec, Displacement, FamilyKind, IntervalMap, ValidationReport};
pub use error::{Error, Result};
pub use fixed_points::{FixedPointReport, Stratum};
pub use orbit::{GrowthCurve, GrowthRecord, Orbit};



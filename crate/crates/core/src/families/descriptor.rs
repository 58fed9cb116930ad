use serde::{Deserialize, Serialize};

use super::bumps::{FlatBumpSchedule, DEFAULT_BUMPS, DEFAULT_C_FILL};
use super::hoelder::{HoelderPiece, HoelderSchedule};
use crate::diffeo::DiffeoSpec;
use crate::error::{Error, Result};

fn default_bumps() -> usize {
    DEFAULT_BUMPS
}

fn default_step_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoelderPieceDescriptor {
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    /// Window width; normalised from the empirical Hölder constant if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

/// Serializable family parameters, as found in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyDescriptor {
    Identity,
    Hyperbolic {
        c: f64,
    },
    PolynomialFlat {
        k: u32,
        /// Absolute coefficient; takes precedence over `c_fraction`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
        /// Coefficient as a fraction of the monotonicity bound (default 1/2).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_fraction: Option<f64>,
    },
    ConjugatedTranslation {
        c: f64,
    },
    FlatBumpThm2 {
        #[serde(default = "default_bumps")]
        bumps: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_fill: Option<f64>,
    },
    HoelderThm3b {
        alpha: f64,
        pieces: Vec<HoelderPieceDescriptor>,
    },
    FlatExp {
        c: f64,
    },
    Flow {
        base: Box<FamilyDescriptor>,
        t: f64,
        #[serde(default = "default_step_tol")]
        step_tol: f64,
    },
    /// The raw map `x + bar_phi(x)`; not a diffeomorphism of `[0, 1]`.
    BarPhi {
        alpha: f64,
        beta: f64,
    },
}

impl FamilyDescriptor {
    pub fn build(&self) -> Result<DiffeoSpec> {
        let spec = match self {
            FamilyDescriptor::Identity => super::identity(),
            FamilyDescriptor::Hyperbolic { c } => super::hyperbolic(*c)?,
            FamilyDescriptor::PolynomialFlat { k, c, c_fraction } => {
                let c = match (c, c_fraction) {
                    (Some(c), _) => *c,
                    (None, frac) => {
                        if *k < 2 {
                            return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
                        }
                        frac.unwrap_or(0.5) * super::polynomial_c_max(*k)
                    }
                };
                super::polynomial_flat(*k, c)?
            }
            FamilyDescriptor::ConjugatedTranslation { c } => {
                if !c.is_finite() {
                    return Err(Error::InvalidParameter(format!("c must be finite, got {c}")));
                }
                super::conjugated_translation(*c)
            }
            FamilyDescriptor::FlatBumpThm2 { bumps, c_fill } => {
                let mut s = FlatBumpSchedule::default_with(*bumps);
                s.c_fill = c_fill.unwrap_or(DEFAULT_C_FILL);
                super::flat_bump_thm2(&s)?
            }
            FamilyDescriptor::HoelderThm3b { alpha, pieces } => {
                let mut out = Vec::with_capacity(pieces.len());
                for p in pieces {
                    let scale = match p.scale {
                        Some(s) => s,
                        None => HoelderSchedule::normalized(*alpha, &[(p.beta, p.a, p.b)])?.pieces[0].scale,
                    };
                    out.push(HoelderPiece { beta: p.beta, a: p.a, b: p.b, scale });
                }
                super::hoelder_thm3b(&HoelderSchedule::new(*alpha, out)?)?
            }
            FamilyDescriptor::FlatExp { c } => super::flat_exp(*c)?,
            FamilyDescriptor::Flow { base, t, step_tol } => super::flow_family(&base.build()?, *t, *step_tol)?,
            FamilyDescriptor::BarPhi { alpha, beta } => super::bar_phi_map(*alpha, *beta)?,
        };
        Ok(spec.with_descriptor(self.clone()))
    }

    /// Builds without parameter checks where the family allows it, so that
    /// invalid maps can still be inspected by `validate`.
    pub fn build_unchecked(&self) -> Result<DiffeoSpec> {
        match self {
            FamilyDescriptor::Hyperbolic { c } => Ok(super::hyperbolic_unchecked(*c).with_descriptor(self.clone())),
            FamilyDescriptor::PolynomialFlat { k, c: Some(c), .. } if *k >= 1 => {
                Ok(super::polynomial_flat_unchecked(*k, *c).with_descriptor(self.clone()))
            }
            FamilyDescriptor::FlatExp { c } => Ok(super::flat_exp_unchecked(*c).with_descriptor(self.clone())),
            _ => self.build(),
        }
    }
}

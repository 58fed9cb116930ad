use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orbit::GrowthCurve;

pub const MIN_FIT_POINTS: usize = 5;

/// Coordinates of the least-squares line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMode {
    /// `log Γ_n` against `log n`.
    Power,
    /// `log Γ_n` against `n`.
    ExpRate,
    /// `log log Γ_n` against `log n`.
    Loglog,
}

impl FromStr for FitMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(FitMode::Power),
            "exp-rate" => Ok(FitMode::ExpRate),
            "loglog" => Ok(FitMode::Loglog),
            other => Err(Error::Argument(format!("unknown fit mode {other:?}; expected power, exp-rate or loglog"))),
        }
    }
}

impl fmt::Display for FitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitMode::Power => "power",
            FitMode::ExpRate => "exp-rate",
            FitMode::Loglog => "loglog",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub mode: FitMode,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (u64, u64),
    pub points: usize,
    pub max_abs_residual: f64,
}

/// Ordinary least squares fit of `y` on `x`.
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    let mut max_res = 0.0f64;
    for (x, y) in xs.iter().zip(ys) {
        let r = y - (intercept + slope * x);
        ss_res += r * r;
        max_res = max_res.max(r.abs());
    }
    let r2 = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    (slope, intercept, r2, max_res)
}

/// Fit on raw `(n, log Γ_n)` pairs restricted to `window`.
pub fn fit_points(ns: &[u64], log_gammas: &[f64], mode: FitMode, window: (u64, u64)) -> Result<ExponentFit> {
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::Argument(format!("empty window [{lo}, {hi}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&n, &g) in ns.iter().zip(log_gammas) {
        if n < lo || n > hi {
            continue;
        }
        let (x, y) = match mode {
            FitMode::Power => ((n as f64).ln(), g),
            FitMode::ExpRate => (n as f64, g),
            FitMode::Loglog => {
                if !(g > 0.0) {
                    return Err(Error::Argument(format!("loglog fit needs log Γ_n > 0, got {g} at n = {n}")));
                }
                ((n as f64).ln(), g.ln())
            }
        };
        xs.push(x);
        ys.push(y);
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::Argument(format!(
            "window [{lo}, {hi}] holds {} checkpoints; at least {MIN_FIT_POINTS} needed",
            xs.len()
        )));
    }
    let (slope, intercept, r_squared, max_abs_residual) = ols(&xs, &ys);
    Ok(ExponentFit { mode, slope, intercept, r_squared, window, points: xs.len(), max_abs_residual })
}

pub fn fit_exponent(curve: &GrowthCurve, mode: FitMode, window: (u64, u64)) -> Result<ExponentFit> {
    let gs: Vec<f64> = curve.records.iter().map(|r| r.log_gamma).collect();
    fit_points(&curve.checkpoints, &gs, mode, window)
}

//! Oscillating displacements with Hölder-continuous derivative.
//!
//! `bar_phi(x) = (x^{-1/b} - 1)^{-b} - x - x^e sin(2 pi x^{-1/b})` with
//! `e = (a+1)(b+1)/b` sends `j^{-b}` to `(j-1)^{-b}`, so orbits started on
//! that lattice are explicit.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::diffeo::IntervalMap;
use crate::error::{Error, Result};
use crate::numeric::holder::holder_seminorm;
use crate::numeric::roots::bisect_sign_change;
use crate::numeric::smooth::{cutoff, cutoff_deriv};

/// Zeros of `bar_phi'` probed past the first lattice point below `Delta/2`.
const DELTA_SEARCH: usize = 64;

fn check_exponents(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(beta > 0.0 && beta + 1.0 < 1.0 / alpha) {
        return Err(Error::InvalidParameter(format!("need 0 < beta and beta + 1 < 1/alpha, got alpha={alpha}, beta={beta}")));
    }
    Ok(())
}

/// Fractional offset of `tau` from the nearest integer; `sin(2 pi tau)` and
/// `cos(2 pi tau)` are evaluated on it to keep the phase accurate.
#[inline]
fn phase(tau: f64) -> f64 {
    tau - tau.round()
}

/// Unchecked `bar_phi` for `x` in `(0, 1)`.
#[inline]
pub fn bar_phi_raw(alpha: f64, beta: f64, x: f64) -> f64 {
    let r = x.powf(1.0 / beta);
    let main = x * (-beta * (-r).ln_1p()).exp_m1();
    let e = (alpha + 1.0) * (beta + 1.0) / beta;
    let osc = x.powf(e);
    if osc == 0.0 {
        return main;
    }
    main - osc * (TAU * phase(1.0 / r)).sin()
}

/// Unchecked `bar_phi'` for `x` in `(0, 1)`.
#[inline]
pub fn bar_phi_deriv_raw(alpha: f64, beta: f64, x: f64) -> f64 {
    let r = x.powf(1.0 / beta);
    let main = (-(beta + 1.0) * (-r).ln_1p()).exp_m1();
    let amp = x.powf(alpha * (beta + 1.0) / beta);
    if amp == 0.0 {
        return main;
    }
    let e = (alpha + 1.0) * (beta + 1.0) / beta;
    let (s, c) = (TAU * phase(1.0 / r)).sin_cos();
    main - e * x.powf(e - 1.0) * s + TAU / beta * amp * c
}

fn check_formula(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 0 < alpha < 1 and beta > 0, got alpha={alpha}, beta={beta}")));
    }
    Ok(())
}

/// `bar_phi(alpha, beta, x)` with parameter and domain checks. The formula
/// is evaluated for any `beta > 0`; the Hölder regime `beta + 1 < 1/alpha`
/// is enforced by [`HoelderSchedule`].
pub fn hoelder_bar_phi(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    check_formula(alpha, beta)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain { x, lo: 0.0, hi: 1.0 });
    }
    Ok(bar_phi_raw(alpha, beta, x))
}

/// `bar_phi'(alpha, beta, x)` with parameter and domain checks.
pub fn hoelder_bar_phi_deriv(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    check_formula(alpha, beta)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain { x, lo: 0.0, hi: 1.0 });
    }
    Ok(bar_phi_deriv_raw(alpha, beta, x))
}

/// Empirical Hölder constant of `bar_phi'` on `[0, 1/2]`.
pub fn bar_phi_constant(alpha: f64, beta: f64, grid_size: usize) -> f64 {
    holder_seminorm(
        |x| if x > 0.0 { bar_phi_deriv_raw(alpha, beta, x) } else { 0.0 },
        0.0,
        0.5,
        alpha,
        grid_size,
    )
}

/// The raw map `x + bar_phi(x)`; only the lattice `j^{-beta}` stays in `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct BarPhiMap {
    pub alpha: f64,
    pub beta: f64,
}

impl IntervalMap for BarPhiMap {
    fn displacement(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            0.0
        } else {
            bar_phi_raw(self.alpha, self.beta, x)
        }
    }
    fn displacement_deriv(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            0.0
        } else {
            bar_phi_deriv_raw(self.alpha, self.beta, x)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoelderPiece {
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    /// Rescaling `Delta`: the piece is `bar_phi` seen through a window of
    /// width `Delta` stretched onto `[a, b]`.
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoelderSchedule {
    pub alpha: f64,
    pub pieces: Vec<HoelderPiece>,
}

impl HoelderSchedule {
    pub fn new(alpha: f64, pieces: Vec<HoelderPiece>) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let mut prev_b = 0.0;
        let mut prev_beta = f64::INFINITY;
        for p in &pieces {
            check_exponents(alpha, p.beta)?;
            if !(p.beta < prev_beta) {
                return Err(Error::InvalidParameter("beta_k must be strictly decreasing".into()));
            }
            if !(p.a >= prev_b && p.a < p.b && p.b <= 1.0) {
                return Err(Error::InvalidParameter(format!("intervals must be ordered, disjoint and inside [0, 1]; got [{}, {}]", p.a, p.b)));
            }
            if !(p.scale > 0.0 && p.scale <= 1.0) {
                return Err(Error::InvalidParameter(format!("scale must lie in (0, 1], got {}", p.scale)));
            }
            prev_b = p.b;
            prev_beta = p.beta;
        }
        Ok(Self { alpha, pieces })
    }

    /// Scales `Delta_k = |I_k| K(beta_k)^{-1/alpha}`, with `K` the empirical
    /// Hölder constant of `bar_phi'`, so each rescaled piece has
    /// `f'`-seminorm of order one.
    pub fn normalized(alpha: f64, intervals: &[(f64, f64, f64)]) -> Result<Self> {
        let mut pieces = Vec::with_capacity(intervals.len());
        for &(beta, a, b) in intervals {
            check_exponents(alpha, beta)?;
            let k = bar_phi_constant(alpha, beta, 2000).max(1.0);
            pieces.push(HoelderPiece { beta, a, b, scale: ((b - a) * k.powf(-1.0 / alpha)).min(1.0) });
        }
        Self::new(alpha, pieces)
    }
}

/// Zero of `bar_phi'` below `limit`, bracketed between `(j + 1/2)^{-beta}`
/// and `j^{-beta}` for the first admissible `j` and its successors.
pub fn locate_delta(alpha: f64, beta: f64, limit: f64) -> Result<f64> {
    let j0 = (limit.powf(-1.0 / beta)).floor().max(1.0) as u64 + 1;
    let g = |x: f64| bar_phi_deriv_raw(alpha, beta, x);
    for j in j0..j0 + DELTA_SEARCH as u64 {
        let hi = (j as f64).powf(-beta);
        let lo = (j as f64 + 0.5).powf(-beta);
        if hi >= limit {
            continue;
        }
        if let Ok(d) = bisect_sign_change(g, lo, hi, 0.0) {
            return Ok(d);
        }
    }
    Err(Error::Construction(format!(
        "no zero of bar_phi' found below {limit:e} for alpha={alpha}, beta={beta}"
    )))
}

#[derive(Debug, Clone, Copy)]
struct PieceMap {
    alpha: f64,
    beta: f64,
    a: f64,
    b: f64,
    scale: f64,
    /// `scale / |I|`.
    lambda: f64,
    delta: f64,
    plateau: f64,
}

impl PieceMap {
    /// `(phi_delta(s), phi_delta'(s))` in window coordinates.
    #[inline]
    fn window(&self, s: f64) -> (f64, f64) {
        if s <= 0.0 || s >= self.scale {
            (0.0, 0.0)
        } else if s <= self.delta {
            (bar_phi_raw(self.alpha, self.beta, s), bar_phi_deriv_raw(self.alpha, self.beta, s))
        } else if s <= 0.5 * self.scale {
            (self.plateau, 0.0)
        } else {
            let t = (2.0 * s - self.scale) / self.scale;
            (self.plateau * cutoff(t), self.plateau * cutoff_deriv(t) * 2.0 / self.scale)
        }
    }

    #[inline]
    fn eval(&self, x: f64) -> (f64, f64) {
        let (v, d) = self.window((x - self.a) * self.lambda);
        (v / self.lambda, d)
    }
}

/// Assembled map: rescaled truncated `bar_phi` on each `I_k`, identity elsewhere.
#[derive(Debug, Clone)]
pub struct HoelderMap {
    pieces: Vec<PieceMap>,
}

impl HoelderMap {
    pub fn new(schedule: &HoelderSchedule) -> Result<Self> {
        let mut pieces = Vec::with_capacity(schedule.pieces.len());
        for p in &schedule.pieces {
            let delta = locate_delta(schedule.alpha, p.beta, 0.5 * p.scale)?;
            pieces.push(PieceMap {
                alpha: schedule.alpha,
                beta: p.beta,
                a: p.a,
                b: p.b,
                scale: p.scale,
                lambda: p.scale / (p.b - p.a),
                delta,
                plateau: bar_phi_raw(schedule.alpha, p.beta, delta),
            });
        }
        Ok(Self { pieces })
    }

    /// Cutoff points `delta_k`.
    pub fn deltas(&self) -> Vec<f64> {
        self.pieces.iter().map(|p| p.delta).collect()
    }

    #[inline]
    fn piece_at(&self, x: f64) -> Option<&PieceMap> {
        self.pieces.iter().find(|p| x > p.a && x < p.b)
    }
}

impl IntervalMap for HoelderMap {
    #[inline]
    fn displacement(&self, x: f64) -> f64 {
        self.piece_at(x).map_or(0.0, |p| p.eval(x).0)
    }
    #[inline]
    fn displacement_deriv(&self, x: f64) -> f64 {
        self.piece_at(x).map_or(0.0, |p| p.eval(x).1)
    }
    #[inline]
    fn step(&self, x: f64) -> (f64, f64) {
        match self.piece_at(x) {
            None => (x, 0.0),
            Some(p) => {
                let (v, d) = p.eval(x);
                (x + v, d.ln_1p())
            }
        }
    }
    fn is_fixed(&self, x: f64) -> bool {
        self.piece_at(x).is_none()
    }
}

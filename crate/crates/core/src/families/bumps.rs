//! Parked parabolic bumps on the intervals `I_k = (1/(2k), 1/(2k-1))`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::diffeo::IntervalMap;
use crate::error::{Error, Result};
use crate::numeric::smooth::Plateau;

/// Amplitude of the flat filler `c_fill exp(-1/(x(1-x)))`.
pub const DEFAULT_C_FILL: f64 = 1e-4;

/// Number of bumps in the default schedule.
pub const DEFAULT_BUMPS: usize = 4;

/// One parked bump: `phi = gamma (x - z)^2 + omega` on `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpEntry {
    pub k: usize,
    pub interval: (f64, f64),
    pub parked: (f64, f64),
    pub z: f64,
    pub w: f64,
    pub gamma: f64,
    pub omega: f64,
    pub n_k: u64,
}

impl BumpEntry {
    pub fn interval_for(k: usize) -> (f64, f64) {
        (1.0 / (2 * k) as f64, 1.0 / (2 * k - 1) as f64)
    }
}

/// Rate condition `gamma_k w_k >= eps(n_k)` for one bump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateCondition {
    pub k: usize,
    pub gamma_w: f64,
    pub epsilon: f64,
    pub holds: bool,
}

type Epsilon = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct FlatBumpSchedule {
    pub entries: Vec<BumpEntry>,
    pub c_fill: f64,
    epsilon: Epsilon,
}

impl fmt::Debug for FlatBumpSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlatBumpSchedule")
            .field("entries", &self.entries)
            .field("c_fill", &self.c_fill)
            .finish_non_exhaustive()
    }
}

/// Ceiling that ignores roundoff above an integer.
fn ceil_loose(v: f64) -> u64 {
    let r = v.round();
    if (v - r).abs() <= 1e-12 * v { r as u64 } else { v.ceil() as u64 }
}

/// `1 / log(n + 2)`.
pub fn default_epsilon(n: u64) -> f64 {
    1.0 / ((n as f64) + 2.0).ln()
}

impl FlatBumpSchedule {
    /// `K` bumps with `w_k = |I_k|/4` centred in `I_k`, `J_k` the central
    /// half, `gamma_k = 10^-2 2^-k`, `omega_k = 10^-6 gamma_k` and
    /// `n_k = ceil(3 / (gamma_k w_k))`.
    pub fn default_with(bumps: usize) -> Self {
        let entries = (1..=bumps)
            .map(|k| {
                let (a, b) = BumpEntry::interval_for(k);
                let len = b - a;
                let w = len / 4.0;
                let mid = 0.5 * (a + b);
                let gamma = 1e-2 * 0.5f64.powi(k as i32);
                BumpEntry {
                    k,
                    interval: (a, b),
                    parked: (a + len / 4.0, b - len / 4.0),
                    z: mid - w / 2.0,
                    w,
                    gamma,
                    omega: gamma * 1e-6,
                    n_k: ceil_loose(3.0 / (gamma * w)),
                }
            })
            .collect();
        Self { entries, c_fill: DEFAULT_C_FILL, epsilon: Arc::new(default_epsilon) }
    }

    pub fn with_entries(entries: Vec<BumpEntry>, c_fill: f64) -> Self {
        Self { entries, c_fill, epsilon: Arc::new(default_epsilon) }
    }

    pub fn with_epsilon<E: Fn(u64) -> f64 + Send + Sync + 'static>(mut self, eps: E) -> Self {
        self.epsilon = Arc::new(eps);
        self
    }

    pub fn epsilon(&self, n: u64) -> f64 {
        (self.epsilon)(n)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Structural checks and the step-count condition `n_k >= 3/(gamma_k w_k)`.
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.c_fill > 0.0) || !self.c_fill.is_finite() {
            return bad(format!("filler amplitude must be positive, got {}", self.c_fill));
        }
        let mut prev_gamma = f64::INFINITY;
        for (i, e) in self.entries.iter().enumerate() {
            if e.k != i + 1 {
                return bad(format!("bump {} carries index {}", i + 1, e.k));
            }
            let (a, b) = BumpEntry::interval_for(e.k);
            if (e.interval.0 - a).abs() > 1e-15 || (e.interval.1 - b).abs() > 1e-15 {
                return bad(format!("bump {} interval must be (1/{}, 1/{})", e.k, 2 * e.k, 2 * e.k - 1));
            }
            let (ja, jb) = e.parked;
            if !(a < ja && ja < jb && jb < b) {
                return bad(format!("bump {}: J must lie inside I", e.k));
            }
            if !(e.w > 0.0 && ja < e.z && e.z + e.w < jb) {
                return bad(format!("bump {}: [z, z+w] must lie inside J", e.k));
            }
            if !(e.gamma > 0.0 && e.gamma < 0.01 && e.gamma < prev_gamma) {
                return bad(format!("bump {}: gamma must be in (0, 1/100) and strictly decreasing", e.k));
            }
            if !(e.omega > 0.0 && e.omega <= e.gamma) {
                return bad(format!("bump {}: omega must be in (0, gamma]", e.k));
            }
            if (e.n_k as f64) < 3.0 / (e.gamma * e.w) * (1.0 - 1e-12) {
                return bad(format!("bump {}: n_k = {} < 3/(gamma w) = {:.1}", e.k, e.n_k, 3.0 / (e.gamma * e.w)));
            }
            prev_gamma = e.gamma;
        }
        Ok(())
    }

    pub fn rate_conditions(&self) -> Vec<RateCondition> {
        self.entries
            .iter()
            .map(|e| {
                let eps = self.epsilon(e.n_k);
                RateCondition { k: e.k, gamma_w: e.gamma * e.w, epsilon: eps, holds: e.gamma * e.w >= eps }
            })
            .collect()
    }

    pub fn rate_condition_holds(&self) -> bool {
        self.rate_conditions().iter().all(|r| r.holds)
    }

    /// `z_k + m` for `m = (w_k/3) 2^{-i/2}`, `i = 0..=40`.
    pub fn seeds(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for e in &self.entries {
            for i in 0..=40 {
                out.push(e.z + e.w / 3.0 * 0.5f64.powf(i as f64 / 2.0));
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
struct BumpPiece {
    gamma: f64,
    omega: f64,
    z: f64,
    /// 1 on `J`, supported in `I`.
    carrier: Plateau,
    /// 1 on `[z, z+w]`, supported in `J`; masks the filler.
    mask: Plateau,
}

/// Displacement `sum_k (gamma_k (x - z_k)^2 + omega_k) u_k + F (1 - sum_k v_k)`.
#[derive(Debug, Clone)]
pub struct FlatBumpMap {
    pieces: Vec<BumpPiece>,
    c_fill: f64,
}

impl FlatBumpMap {
    pub fn new(schedule: &FlatBumpSchedule) -> Self {
        let pieces = schedule
            .entries
            .iter()
            .map(|e| BumpPiece {
                gamma: e.gamma,
                omega: e.omega,
                z: e.z,
                // Ramps end `|I|/8` inside `I`, so near `x = 1` only the filler
                // survives and flatness there is visible to finite differences.
                carrier: {
                    let margin = ((e.interval.1 - e.interval.0) / 8.0).min(0.5 * (e.parked.0 - e.interval.0)).min(0.5 * (e.interval.1 - e.parked.1));
                    Plateau::new(e.interval.0 + margin, e.parked.0, e.parked.1, e.interval.1 - margin)
                },
                mask: Plateau::new(e.z - e.w / 4.0, e.z, e.z + e.w, e.z + e.w + e.w / 4.0),
            })
            .collect();
        Self { pieces, c_fill: schedule.c_fill }
    }

    #[inline]
    fn piece_at(&self, x: f64) -> Option<&BumpPiece> {
        if !(x > 0.0 && x < 1.0) {
            return None;
        }
        let k = (0.5 / x).ceil() as usize;
        let p = self.pieces.get(k.checked_sub(1)?)?;
        p.carrier.contains_support(x).then_some(p)
    }

    #[inline]
    fn filler(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 || x >= 1.0 {
            return (0.0, 0.0);
        }
        let u = x * (1.0 - x);
        let v = self.c_fill * (-1.0 / u).exp();
        (v, v * (1.0 - 2.0 * x) / (u * u))
    }

    /// `(phi, phi')`.
    #[inline]
    fn eval(&self, x: f64) -> (f64, f64) {
        let (fill, dfill) = self.filler(x);
        match self.piece_at(x) {
            None => (fill, dfill),
            Some(p) => {
                let (u, du) = p.carrier.eval(x);
                let (v, dv) = p.mask.eval(x);
                let d = x - p.z;
                let q = p.gamma * d * d + p.omega;
                let dq = 2.0 * p.gamma * d;
                (q * u + fill * (1.0 - v), dq * u + q * du + dfill * (1.0 - v) - fill * dv)
            }
        }
    }
}

impl IntervalMap for FlatBumpMap {
    fn displacement(&self, x: f64) -> f64 {
        self.eval(x).0
    }
    fn displacement_deriv(&self, x: f64) -> f64 {
        self.eval(x).1
    }
    #[inline]
    fn step(&self, x: f64) -> (f64, f64) {
        let (p, dp) = self.eval(x);
        (x + p, dp.ln_1p())
    }
    fn log_displacement(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return f64::NEG_INFINITY;
        }
        let (p, _) = self.eval(x);
        if p > 0.0 {
            p.ln()
        } else if self.piece_at(x).is_none() {
            self.c_fill.ln() - 1.0 / (x * (1.0 - x))
        } else {
            f64::NEG_INFINITY
        }
    }
    fn is_fixed(&self, x: f64) -> bool {
        x <= 0.0 || x >= 1.0
    }
}

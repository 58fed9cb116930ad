//! Fixed-point location and classification into strata.
//!
//! A fixed point is E1 when `f' != 1`, Ek when the first nonvanishing
//! displacement derivative has order `k`, and `FlatToOrder(m)` when no
//! derivative up to order `m` is distinguishable from zero. Points inside
//! intervals of fixed points are labelled `FixedInterval`.

use serde::{Deserialize, Serialize};

use crate::diffeo::DiffeoSpec;
use crate::error::{Error, Result};
use crate::numeric::diff::MAX_ORDER;
use crate::numeric::roots::bisect_sign_change;

pub const LOCATE_TOL: f64 = 1e-9;
pub const CLASSIFY_TOL: f64 = 1e-5;
pub const DEFAULT_GRID: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stratum", rename_all = "kebab-case")]
pub enum Stratum {
    E1 { multiplier: f64 },
    Ek { k: u32, derivative: f64 },
    FlatToOrder { m: u32 },
    FixedInterval,
}

impl Stratum {
    pub fn label(&self) -> String {
        match self {
            Stratum::E1 { .. } => "E1".into(),
            Stratum::Ek { k, .. } => format!("E{k}"),
            Stratum::FlatToOrder { m } => format!("flat-to-order-{m}"),
            Stratum::FixedInterval => "fixed-interval".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSet {
    /// Sorted locations, always including `0` and `1`.
    pub points: Vec<f64>,
    /// Maximal grid intervals on which the displacement vanishes identically.
    pub fixed_intervals: Vec<(f64, f64)>,
}

impl FixedPointSet {
    pub fn in_fixed_interval(&self, x: f64) -> bool {
        self.fixed_intervals.iter().any(|&(a, b)| x >= a && x <= b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub location: f64,
    #[serde(flatten)]
    pub stratum: Stratum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub points: Vec<FixedPoint>,
    pub fixed_intervals: Vec<(f64, f64)>,
    #[serde(rename = "V")]
    pub v: f64,
    pub detection_grid: usize,
}

/// Endpoints, isolated zeros of the displacement (sign changes refined by
/// bisection to `|phi| <= tol`) and intervals of fixed points. Detections
/// closer than `2 / grid_size` are merged.
pub fn find_fixed_points(spec: &DiffeoSpec, grid_size: usize, tol: f64) -> FixedPointSet {
    let n = grid_size.max(2);
    let phi = spec.displacement();
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let fixed: Vec<bool> = xs.iter().map(|&x| phi.is_zero(x)).collect();

    let mut points = vec![0.0, 1.0];
    let mut intervals = Vec::new();
    let mut i = 0;
    while i <= n {
        if fixed[i] {
            let start = i;
            while i < n && fixed[i + 1] {
                i += 1;
            }
            if i > start {
                intervals.push((xs[start], xs[i]));
                points.push(xs[start]);
                points.push(xs[i]);
            } else {
                points.push(xs[i]);
            }
        }
        i += 1;
    }

    // Sign changes between consecutive non-fixed probes; an underflowed
    // displacement inherits the previous sign.
    let mut prev: Option<(f64, f64)> = None;
    for (k, &x) in xs.iter().enumerate() {
        if fixed[k] {
            prev = None;
            continue;
        }
        let v = phi.value(x);
        let s = if v != 0.0 { v.signum() } else { prev.map_or(0.0, |p| p.1) };
        if let Some((px, ps)) = prev {
            if s != 0.0 && ps != 0.0 && s != ps {
                if let Ok(root) = bisect_sign_change(|t| phi.value(t), px, x, tol) {
                    points.push(root);
                }
            }
        }
        prev = Some((x, s));
    }

    points.sort_by(f64::total_cmp);
    let merge = 2.0 / n as f64;
    let mut merged: Vec<f64> = Vec::with_capacity(points.len());
    for p in points {
        match merged.last() {
            Some(&q) if p - q < merge && !intervals.iter().any(|&(a, b)| p == a || p == b) => {
                if p == 1.0 {
                    *merged.last_mut().expect("nonempty") = 1.0;
                }
            }
            Some(&q) if p == q => {}
            _ => merged.push(p),
        }
    }
    FixedPointSet { points: merged, fixed_intervals: intervals }
}

/// Stratum of a fixed point `x_star` with thresholds `tol` for the
/// multiplier and `sqrt(tol)` for higher displacement derivatives.
pub fn classify_fixed_point(spec: &DiffeoSpec, x_star: f64, max_order: u32, tol: f64) -> Result<Stratum> {
    if !(2..=MAX_ORDER).contains(&max_order) {
        return Err(Error::Argument(format!("max_order must lie in 2..={MAX_ORDER}, got {max_order}")));
    }
    let phi = spec.displacement();
    let v = phi.value(x_star);
    if !(v.abs() <= tol) {
        return Err(Error::Argument(format!("{x_star} is not a fixed point: phi = {v:e}")));
    }
    let m = spec.deriv(x_star, 1)?;
    if (m - 1.0).abs() > tol {
        return Ok(Stratum::E1 { multiplier: m });
    }
    let threshold = tol.sqrt();
    for k in 2..=max_order {
        let d = spec.deriv(x_star, k)?;
        if d.abs() > threshold {
            return Ok(Stratum::Ek { k, derivative: d });
        }
    }
    Ok(Stratum::FlatToOrder { m: max_order })
}

/// `V = max |log f'(p)|` over the given fixed points.
#[allow(non_snake_case)]
pub fn compute_V(spec: &DiffeoSpec, points: &[f64]) -> f64 {
    points.iter().map(|&p| spec.map().log_derivative(p).abs()).fold(0.0, f64::max)
}

/// Full report with the default tolerances.
pub fn fixed_point_report(spec: &DiffeoSpec, grid_size: usize) -> Result<FixedPointReport> {
    fixed_point_report_with(spec, grid_size, LOCATE_TOL, CLASSIFY_TOL)
}

pub fn fixed_point_report_with(
    spec: &DiffeoSpec,
    grid_size: usize,
    locate_tol: f64,
    classify_tol: f64,
) -> Result<FixedPointReport> {
    let set = find_fixed_points(spec, grid_size, locate_tol);
    let mut points = Vec::with_capacity(set.points.len());
    for &p in &set.points {
        let stratum = if set.in_fixed_interval(p) {
            Stratum::FixedInterval
        } else {
            classify_fixed_point(spec, p, MAX_ORDER, classify_tol)?
        };
        points.push(FixedPoint { location: p, stratum });
    }
    Ok(FixedPointReport {
        v: compute_V(spec, &set.points),
        points,
        fixed_intervals: set.fixed_intervals,
        detection_grid: grid_size,
    })
}

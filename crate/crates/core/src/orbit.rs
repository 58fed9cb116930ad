//! Orbits, the distortion sum `Phi(n, x) = sum_{k=1}^n log f'(x_k)` and the
//! growth sequence `log Γ_n = max(max_x Phi(n, x), -min_x Phi(n, x))`.
//!
//! The backward branch uses `sup (f^{-n})' = 1 / inf (f^n)'`, so only forward
//! orbits are ever computed. Everything stays in log space.

use serde::{Deserialize, Serialize};

use crate::diffeo::{DiffeoSpec, IntervalMap, BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::par::{self, Execution};

/// Smallest grid accepted by [`growth_sequence`].
pub const MIN_GRID: usize = 16;
pub const DEFAULT_REFINEMENT_ROUNDS: u32 = 3;
/// Coarse candidates refined per checkpoint, separately for max and min.
pub const DEFAULT_CANDIDATES: usize = 4;
/// Sub-grid points per refinement round.
pub const REFINE_POINTS: usize = 17;
/// Radius shrink factor per refinement round.
pub const REFINE_SHRINK: f64 = 8.0;
/// Depth of the geometric start points `2^-j` and `1 - 2^-j`.
pub const GEOMETRIC_DEPTH: i32 = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub start: f64,
    /// `x_1, ..., x_{n+1}`.
    pub points: Vec<f64>,
    /// `phi_partial[m] = Phi(m, x_1)`, with `phi_partial[0] = 0`.
    pub phi_partial: Vec<f64>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.phi_partial.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn phi(&self) -> f64 {
        *self.phi_partial.last().expect("orbit has at least one partial sum")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub n: u64,
    pub log_gamma: f64,
    pub log_max_fwd: f64,
    pub log_min_fwd: f64,
    pub argmax_start: f64,
    pub argmin_start: f64,
}

impl GrowthRecord {
    fn from_extremes(n: u64, max: (f64, f64), min: (f64, f64)) -> Self {
        Self {
            n,
            // `+ 0.0` folds a signed zero so identity rows print as 0.
            log_gamma: max.0.max(-min.0) + 0.0,
            log_max_fwd: max.0 + 0.0,
            log_min_fwd: min.0 + 0.0,
            argmax_start: max.1,
            argmin_start: min.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCurve {
    pub checkpoints: Vec<u64>,
    pub records: Vec<GrowthRecord>,
    pub grid_size: usize,
    pub refinement_rounds: u32,
}

impl GrowthCurve {
    pub fn record_at(&self, n: u64) -> Option<&GrowthRecord> {
        self.checkpoints.binary_search(&n).ok().map(|i| &self.records[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthOptions {
    pub grid_size: usize,
    pub refinement_rounds: u32,
    pub candidates: usize,
    pub execution: Execution,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        Self {
            grid_size: 4096,
            refinement_rounds: DEFAULT_REFINEMENT_ROUNDS,
            candidates: DEFAULT_CANDIDATES,
            execution: Execution::Auto,
        }
    }
}

impl GrowthOptions {
    pub fn with_grid(grid_size: usize) -> Self {
        Self { grid_size, ..Self::default() }
    }
}

/// Orbit point after clamping roundoff excursions past the boundary.
#[inline]
fn admit(y: f64, x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&y) {
        return Ok(y);
    }
    if (-BOUNDARY_TOL..0.0).contains(&y) {
        return Ok(0.0);
    }
    if y > 1.0 && y <= 1.0 + BOUNDARY_TOL {
        return Ok(1.0);
    }
    Err(Error::InvalidSpec(format!("orbit left [0, 1]: f({x}) = {y}")))
}

#[inline]
fn admit_log(ld: f64, x: f64) -> Result<f64> {
    if ld.is_finite() {
        Ok(ld)
    } else {
        Err(Error::InvalidSpec(format!("log f'({x}) = {ld} is not finite")))
    }
}

fn check_start(x1: f64, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Argument("orbit length must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&x1) {
        return Err(Error::Domain { x: x1, lo: 0.0, hi: 1.0 });
    }
    Ok(())
}

/// Forward orbit of length `n` with all partial distortion sums.
pub fn iterate_orbit(spec: &DiffeoSpec, x1: f64, n: u64) -> Result<Orbit> {
    check_start(x1, n)?;
    let map = spec.map();
    let len = usize::try_from(n).map_err(|_| Error::Argument(format!("orbit length {n} too large")))?;
    let mut points = Vec::with_capacity(len + 1);
    let mut phi_partial = Vec::with_capacity(len + 1);
    let mut sum = CompensatedSum::new();
    let mut x = x1;
    points.push(x);
    phi_partial.push(0.0);
    for _ in 0..len {
        let (y, ld) = map.step(x);
        sum.add(admit_log(ld, x)?);
        x = admit(y, x)?;
        points.push(x);
        phi_partial.push(sum.value());
    }
    Ok(Orbit { start: x1, points, phi_partial })
}

/// `Phi(n, x_1)` without storing the orbit.
pub fn phi_sum(spec: &DiffeoSpec, x1: f64, n: u64) -> Result<f64> {
    check_start(x1, n)?;
    Ok(*checkpoint_phis(spec.map(), x1, &[n])?.first().expect("one checkpoint"))
}

/// `Phi` at each checkpoint along one orbit. Once the orbit is stuck at a
/// floating-point fixed point the remaining terms are added in one product.
fn checkpoint_phis(map: &dyn IntervalMap, x1: f64, checkpoints: &[u64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut sum = CompensatedSum::new();
    let mut x = x1;
    let mut k = 0u64;
    let mut stuck: Option<f64> = None;
    for &c in checkpoints {
        if let Some(ld) = stuck {
            sum.add(ld * (c - k) as f64);
            k = c;
        }
        while k < c {
            let (y, ld) = map.step(x);
            let ld = admit_log(ld, x)?;
            sum.add(ld);
            k += 1;
            let y = admit(y, x)?;
            if y == x {
                stuck = Some(ld);
                sum.add(ld * (c - k) as f64);
                k = c;
                break;
            }
            x = y;
        }
        out.push(sum.value());
    }
    Ok(out)
}

/// Closed-form `log (f^n)'(x)` for families that provide iterates.
pub fn closed_form_phi(spec: &DiffeoSpec, x: f64, n: u64) -> Option<f64> {
    spec.map().closed_iterate(x, n as f64).map(|(_, ld)| ld)
}

/// Deterministic start grid: `G` uniform interior points, the family seeds,
/// `2^-j` and `1 - 2^-j` for `j = 1..=40`, and both endpoints.
pub fn start_grid(spec: &DiffeoSpec, grid_size: usize) -> Vec<f64> {
    let mut starts: Vec<f64> = (1..=grid_size).map(|i| i as f64 / (grid_size + 1) as f64).collect();
    starts.extend(spec.suggested_seeds().iter().copied());
    for j in 1..=GEOMETRIC_DEPTH {
        let t = 0.5f64.powi(j);
        starts.push(t);
        starts.push(1.0 - t);
    }
    starts.push(0.0);
    starts.push(1.0);
    starts.retain(|x| (0.0..=1.0).contains(x));
    starts.sort_by(f64::total_cmp);
    starts.dedup();
    starts
}

/// Growth sequence with default options and the given grid size.
pub fn growth_sequence(spec: &DiffeoSpec, n_max: u64, grid_size: usize, checkpoints: &[u64]) -> Result<GrowthCurve> {
    growth_sequence_with(spec, n_max, checkpoints, &GrowthOptions::with_grid(grid_size))
}

fn normalize_checkpoints(n_max: u64, checkpoints: &[u64]) -> Result<Vec<u64>> {
    if checkpoints.is_empty() {
        return Err(Error::Argument("checkpoint list is empty".into()));
    }
    let mut cps = checkpoints.to_vec();
    cps.sort_unstable();
    cps.dedup();
    if cps[0] == 0 || *cps.last().expect("nonempty") > n_max {
        return Err(Error::Argument(format!("checkpoints must lie in [1, {n_max}]")));
    }
    Ok(cps)
}

/// Index of the extreme value, first index on ties.
fn extreme(values: &[f64], maximize: bool) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if (maximize && v > values[best]) || (!maximize && v < values[best]) {
            best = i;
        }
    }
    best
}

/// Up to `count` indices ordered by value, ties by index.
fn top_candidates(values: &[f64], count: usize, maximize: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        let ord = values[a].total_cmp(&values[b]);
        let ord = if maximize { ord.reverse() } else { ord };
        ord.then(a.cmp(&b))
    });
    idx.truncate(count);
    idx
}

pub fn growth_sequence_with(
    spec: &DiffeoSpec,
    n_max: u64,
    checkpoints: &[u64],
    options: &GrowthOptions,
) -> Result<GrowthCurve> {
    if options.grid_size < MIN_GRID {
        return Err(Error::Argument(format!("grid size must be at least {MIN_GRID}, got {}", options.grid_size)));
    }
    let cps = normalize_checkpoints(n_max, checkpoints)?;
    let starts = start_grid(spec, options.grid_size);
    let map = spec.map();
    let per_start: Vec<Result<Vec<f64>>> = par::map_with(options.execution, &starts, |&x| checkpoint_phis(map, x, &cps));
    let per_start: Vec<Vec<f64>> = per_start.into_iter().collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(cps.len());
    let mut column = vec![0.0; starts.len()];
    for (ci, &n) in cps.iter().enumerate() {
        for (slot, row) in column.iter_mut().zip(&per_start) {
            *slot = row[ci];
        }
        let mut best = [(0.0, 0.0); 2];
        for (bi, maximize) in [(0, true), (1, false)] {
            let i = extreme(&column, maximize);
            best[bi] = (column[i], starts[i]);
            if options.refinement_rounds == 0 {
                continue;
            }
            for c in top_candidates(&column, options.candidates, maximize) {
                let gap_lo = if c > 0 { starts[c] - starts[c - 1] } else { 0.0 };
                let gap_hi = if c + 1 < starts.len() { starts[c + 1] - starts[c] } else { 0.0 };
                let radius = gap_lo.max(gap_hi);
                let found =
                    refine_extreme(map, n, starts[c], column[c], radius, options.refinement_rounds, maximize, options.execution)?;
                let better = if maximize { found.0 > best[bi].0 } else { found.0 < best[bi].0 };
                if better {
                    best[bi] = found;
                }
            }
        }
        records.push(GrowthRecord::from_extremes(n, best[0], best[1]));
    }
    Ok(GrowthCurve { checkpoints: cps, records, grid_size: options.grid_size, refinement_rounds: options.refinement_rounds })
}

/// Local search for the extreme of `Phi(n, .)` near `center`: each round
/// scans 17 points over `center ± radius` (clipped to `[0, 1]`), recentres
/// on the best and shrinks the radius eightfold.
#[allow(clippy::too_many_arguments)]
fn refine_extreme(
    map: &dyn IntervalMap,
    n: u64,
    center: f64,
    center_value: f64,
    mut radius: f64,
    rounds: u32,
    maximize: bool,
    execution: Execution,
) -> Result<(f64, f64)> {
    let mut best = (center_value, center);
    let half = (REFINE_POINTS / 2) as f64;
    for _ in 0..rounds {
        if !(radius > 0.0) {
            break;
        }
        let c = best.1;
        let pts: Vec<f64> = (0..REFINE_POINTS)
            .map(|i| c + radius * (i as f64 - half) / half)
            .filter(|x| (0.0..=1.0).contains(x) && *x != c)
            .collect();
        let vals: Vec<Result<Vec<f64>>> = par::map_with(execution, &pts, |&x| checkpoint_phis(map, x, &[n]));
        for (x, v) in pts.iter().zip(vals) {
            let v = v?[0];
            let better = if maximize { v > best.0 } else { v < best.0 };
            if better {
                best = (v, *x);
            }
        }
        radius /= REFINE_SHRINK;
    }
    Ok(best)
}

/// Refines both extremes of `Phi(n, .)` around a candidate start. The
/// returned record is never worse than the candidate itself.
pub fn refine_argmax(spec: &DiffeoSpec, n: u64, center: f64, radius: f64, rounds: u32) -> Result<GrowthRecord> {
    if !(center - radius >= 0.0 && center + radius <= 1.0) {
        return Err(Error::Argument(format!("window {center} ± {radius} leaves [0, 1]")));
    }
    let map = spec.map();
    let v0 = checkpoint_phis(map, center, &[n])?[0];
    let max = refine_extreme(map, n, center, v0, radius, rounds, true, Execution::Auto)?;
    let min = refine_extreme(map, n, center, v0, radius, rounds, false, Execution::Auto)?;
    Ok(GrowthRecord::from_extremes(n, max, min))
}

/// `count` checkpoints log-spaced over `[lo, hi]`, rounded and deduplicated.
pub fn log_spaced(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    if count <= 1 || hi <= lo {
        return vec![hi.max(1)];
    }
    let (a, b) = ((lo.max(1) as f64).ln(), (hi as f64).ln());
    let mut out: Vec<u64> = (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp().round() as u64)
        .collect();
    out.dedup();
    out
}

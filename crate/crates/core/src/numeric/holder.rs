//! Empirical Hölder seminorm on a uniform grid.

use crate::par;

/// `max |g(x_i) - g(x_j)| / |x_i - x_j|^alpha` over all pairs of a uniform
/// grid of `grid_size + 1` points on `[lo, hi]`. Exact O(n^2) pair scan,
/// split across workers by first index.
pub fn holder_seminorm<G: Fn(f64) -> f64 + Sync>(g: G, lo: f64, hi: f64, alpha: f64, grid_size: usize) -> f64 {
    let n = grid_size.max(1);
    let h = (hi - lo) / n as f64;
    let values: Vec<f64> = (0..=n).map(|i| g(lo + h * i as f64)).collect();
    seminorm_of_samples(&values, h, alpha)
}

/// Seminorm of samples taken with uniform spacing `h`.
pub fn seminorm_of_samples(values: &[f64], h: f64, alpha: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    // Distance weights depend only on the index gap.
    let weights: Vec<f64> = (0..n).map(|d| if d == 0 { 0.0 } else { (h * d as f64).powf(-alpha) }).collect();
    let rows: Vec<usize> = (0..n - 1).collect();
    let maxima = par::map(&rows, |&i| {
        let vi = values[i];
        let mut best = 0.0f64;
        for (d, &vj) in values[i + 1..].iter().enumerate() {
            let r = (vj - vi).abs() * weights[d + 1];
            if r > best {
                best = r;
            }
        }
        best
    });
    maxima.into_iter().fold(0.0, f64::max)
}

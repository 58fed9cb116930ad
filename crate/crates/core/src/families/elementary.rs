use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::diffeo::IntervalMap;

#[derive(Debug, Clone, Copy)]
pub struct IdentityMap;

impl IntervalMap for IdentityMap {
    fn displacement(&self, _x: f64) -> f64 {
        0.0
    }
    fn displacement_deriv(&self, _x: f64) -> f64 {
        0.0
    }
    fn apply(&self, x: f64) -> f64 {
        x
    }
    fn step(&self, x: f64) -> (f64, f64) {
        (x, 0.0)
    }
    fn is_fixed(&self, _x: f64) -> bool {
        true
    }
    fn displacement_higher_deriv(&self, _x: f64, _order: u32) -> Option<f64> {
        Some(0.0)
    }
    fn closed_iterate(&self, x: f64, _n: f64) -> Option<(f64, f64)> {
        Some((x, 0.0))
    }
}

/// `phi(x) = c x (1 - x)`.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolicMap {
    pub c: f64,
}

impl IntervalMap for HyperbolicMap {
    #[inline]
    fn displacement(&self, x: f64) -> f64 {
        self.c * x * (1.0 - x)
    }
    #[inline]
    fn displacement_deriv(&self, x: f64) -> f64 {
        self.c * (1.0 - 2.0 * x)
    }
    fn is_fixed(&self, x: f64) -> bool {
        self.c == 0.0 || x == 0.0 || x == 1.0
    }
    fn displacement_higher_deriv(&self, _x: f64, order: u32) -> Option<f64> {
        Some(if order == 2 { -2.0 * self.c } else { 0.0 })
    }
}

/// `phi(x) = c (x (1 - x))^k`.
#[derive(Debug, Clone)]
pub struct PolynomialFlatMap {
    pub k: u32,
    pub c: f64,
    /// Monomial coefficients of `x^k (1-x)^k`, indexed by power.
    coeffs: Vec<f64>,
}

impl PolynomialFlatMap {
    pub fn new(k: u32, c: f64) -> Self {
        let k_us = k as usize;
        let mut coeffs = vec![0.0; 2 * k_us + 1];
        let mut binom = 1.0;
        for j in 0..=k_us {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[k_us + j] = sign * binom;
            binom = binom * (k_us - j) as f64 / (j + 1) as f64;
        }
        Self { k, c, coeffs }
    }
}

impl IntervalMap for PolynomialFlatMap {
    #[inline]
    fn displacement(&self, x: f64) -> f64 {
        self.c * (x * (1.0 - x)).powi(self.k as i32)
    }
    #[inline]
    fn displacement_deriv(&self, x: f64) -> f64 {
        let u = x * (1.0 - x);
        self.c * self.k as f64 * u.powi(self.k as i32 - 1) * (1.0 - 2.0 * x)
    }
    #[inline]
    fn step(&self, x: f64) -> (f64, f64) {
        let u = x * (1.0 - x);
        let um = u.powi(self.k as i32 - 1);
        let phi = self.c * um * u;
        let dphi = self.c * self.k as f64 * um * (1.0 - 2.0 * x);
        (x + phi, dphi.ln_1p())
    }
    fn is_fixed(&self, x: f64) -> bool {
        self.c == 0.0 || x == 0.0 || x == 1.0
    }
    fn displacement_higher_deriv(&self, x: f64, order: u32) -> Option<f64> {
        let r = order as usize;
        let mut acc = 0.0;
        // Horner in x over the differentiated monomials.
        for m in (r..self.coeffs.len()).rev() {
            let mut falling = 1.0;
            for i in 0..r {
                falling *= (m - i) as f64;
            }
            acc = acc * x + self.coeffs[m] * falling;
        }
        Some(self.c * acc)
    }
}

/// `1 / max |d/dx [x^k (1-x)^k]|` over `[0, 1]`, the monotonicity bound for
/// [`PolynomialFlatMap`]. Computed once per `k` by golden-section search on
/// `[0, 1/2]`, where `|g|` is unimodal.
pub fn polynomial_c_max(k: u32) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("c_max cache poisoned").get(&k) {
        return *v;
    }
    let g = |x: f64| {
        let u = x * (1.0 - x);
        k as f64 * u.powi(k as i32 - 1) * (1.0 - 2.0 * x)
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let x1 = b - inv_phi * (b - a);
        let x2 = a + inv_phi * (b - a);
        if g(x1) < g(x2) {
            a = x1;
        } else {
            b = x2;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    let peak = g(0.5 * (a + b)).max(g(a)).max(g(b));
    let v = 1.0 / peak;
    cache.lock().expect("c_max cache poisoned").insert(k, v);
    v
}

/// `phi(x) = c exp(-1/(x(1-x)))`, flat at both endpoints.
#[derive(Debug, Clone, Copy)]
pub struct FlatExpMap {
    pub c: f64,
}

impl IntervalMap for FlatExpMap {
    #[inline]
    fn displacement(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        self.c * (-1.0 / (x * (1.0 - x))).exp()
    }
    #[inline]
    fn displacement_deriv(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        let u = x * (1.0 - x);
        self.c * (-1.0 / u).exp() * (1.0 - 2.0 * x) / (u * u)
    }
    #[inline]
    fn step(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 || x >= 1.0 {
            return (x, 0.0);
        }
        let u = x * (1.0 - x);
        let phi = self.c * (-1.0 / u).exp();
        (x + phi, (phi * (1.0 - 2.0 * x) / (u * u)).ln_1p())
    }
    fn log_displacement(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 || self.c == 0.0 {
            return f64::NEG_INFINITY;
        }
        self.c.ln() - 1.0 / (x * (1.0 - x))
    }
    fn is_fixed(&self, x: f64) -> bool {
        self.c == 0.0 || x <= 0.0 || x >= 1.0
    }
}

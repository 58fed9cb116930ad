//! Smooth flat transition functions built from `exp(-1/s)`.

/// Smooth step: 0 for `s <= 0`, 1 for `s >= 1`, all derivatives vanishing at
/// both ends. Equal to `B(s) / (B(s) + B(1 - s))` with `B(s) = exp(-1/s)`,
/// evaluated as a logistic of `1/(1-s) - 1/s` to avoid underflow.
#[inline]
pub fn flat_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let z = 1.0 / s - 1.0 / (1.0 - s);
        logistic(-z)
    }
}

/// Derivative of [`flat_step`].
#[inline]
pub fn flat_step_deriv(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        let z = 1.0 / s - 1.0 / (1.0 - s);
        let v = logistic(-z);
        let w = logistic(z);
        v * w * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s)))
    }
}

#[inline]
fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Plateau function: 1 on `[inner_lo, inner_hi]`, 0 outside
/// `(outer_lo, outer_hi)`, smooth and flat at the four transition points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub outer_lo: f64,
    pub inner_lo: f64,
    pub inner_hi: f64,
    pub outer_hi: f64,
}

impl Plateau {
    pub fn new(outer_lo: f64, inner_lo: f64, inner_hi: f64, outer_hi: f64) -> Self {
        debug_assert!(outer_lo < inner_lo && inner_lo <= inner_hi && inner_hi < outer_hi);
        Self { outer_lo, inner_lo, inner_hi, outer_hi }
    }

    #[inline]
    pub fn contains_support(&self, x: f64) -> bool {
        x > self.outer_lo && x < self.outer_hi
    }

    /// Value and derivative.
    #[inline]
    pub fn eval(&self, x: f64) -> (f64, f64) {
        if !self.contains_support(x) {
            return (0.0, 0.0);
        }
        if x >= self.inner_lo && x <= self.inner_hi {
            return (1.0, 0.0);
        }
        if x < self.inner_lo {
            let w = self.inner_lo - self.outer_lo;
            let s = (x - self.outer_lo) / w;
            (flat_step(s), flat_step_deriv(s) / w)
        } else {
            let w = self.outer_hi - self.inner_hi;
            let s = (self.outer_hi - x) / w;
            (flat_step(s), -flat_step_deriv(s) / w)
        }
    }
}

/// Cutoff with `cutoff(s) = 1` near `s <= 0.1`, `0` for `s >= 0.9`, flat at
/// both transitions.
#[inline]
pub fn cutoff(s: f64) -> f64 {
    1.0 - flat_step((s - 0.1) / 0.8)
}

#[inline]
pub fn cutoff_deriv(s: f64) -> f64 {
    -flat_step_deriv((s - 0.1) / 0.8) / 0.8
}

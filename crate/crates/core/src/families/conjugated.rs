use crate::diffeo::IntervalMap;

/// `psi(x) = (2x - 1) / (x (1 - x)) = 1/(1-x) - 1/x`, an increasing bijection
/// `(0, 1) -> R`.
#[inline]
pub fn psi(x: f64) -> f64 {
    1.0 / (1.0 - x) - 1.0 / x
}

/// `psi'(x) = 1/x^2 + 1/(1-x)^2`.
#[inline]
pub fn psi_deriv(x: f64) -> f64 {
    1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x))
}

/// Inverse of [`psi`], written in the branch without cancellation.
#[inline]
pub fn psi_inverse(s: f64) -> f64 {
    let r = s.hypot(2.0);
    if s <= 0.0 {
        2.0 / ((2.0 - s) + r)
    } else {
        1.0 - 2.0 / ((2.0 + s) + r)
    }
}

/// `f = psi^{-1}(psi + c)`: a translation conjugated onto `(0, 1)`.
#[derive(Debug, Clone, Copy)]
pub struct ConjugatedTranslationMap {
    pub c: f64,
}

/// `log (psi'(x) / psi'(y))` for `y = f^n(x)`, using
/// `psi'(x) = q(x) / (x (1-x))^2` with `q = 1 - 2x + 2x^2`.
#[inline]
fn log_psi_ratio(x: f64, y: f64) -> f64 {
    let q = |t: f64| 1.0 - 2.0 * t + 2.0 * t * t;
    q(x).ln() - q(y).ln() + 2.0 * (y / x).ln() + 2.0 * ((1.0 - y) / (1.0 - x)).ln()
}

impl ConjugatedTranslationMap {
    #[inline]
    fn image(&self, x: f64, shift: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 || shift == 0.0 {
            return x;
        }
        psi_inverse(psi(x) + shift)
    }
}

impl IntervalMap for ConjugatedTranslationMap {
    fn displacement(&self, x: f64) -> f64 {
        self.image(x, self.c) - x
    }
    fn displacement_deriv(&self, x: f64) -> f64 {
        self.log_derivative(x).exp_m1()
    }
    #[inline]
    fn apply(&self, x: f64) -> f64 {
        self.image(x, self.c)
    }
    #[inline]
    fn derivative(&self, x: f64) -> f64 {
        self.log_derivative(x).exp()
    }
    #[inline]
    fn log_derivative(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        log_psi_ratio(x, self.image(x, self.c))
    }
    #[inline]
    fn step(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 || x >= 1.0 {
            return (x, 0.0);
        }
        let y = self.image(x, self.c);
        (y, log_psi_ratio(x, y))
    }
    fn is_fixed(&self, x: f64) -> bool {
        self.c == 0.0 || x <= 0.0 || x >= 1.0
    }
    fn closed_iterate(&self, x: f64, n: f64) -> Option<(f64, f64)> {
        if x <= 0.0 || x >= 1.0 {
            return Some((x, 0.0));
        }
        let y = self.image(x, n * self.c);
        Some((y, log_psi_ratio(x, y)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_inverse_roundtrip() {
        for &x in &[1e-300, 1e-9, 0.01, 0.25, 0.5, 0.75, 0.99, 1.0 - 1e-9] {
            let back = psi_inverse(psi(x));
            assert!((back - x).abs() <= 4.0 * f64::EPSILON * x.max(1e-300) + 1e-15, "{x} -> {back}");
        }
    }

    #[test]
    fn golden_image() {
        let m = ConjugatedTranslationMap { c: 1.0 };
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((m.apply(0.5) - golden).abs() < 1e-15);
        let m_neg = ConjugatedTranslationMap { c: -1.0 };
        assert!((m_neg.apply(0.5) - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn log_derivative_matches_psi_ratio() {
        let m = ConjugatedTranslationMap { c: 0.7 };
        for &x in &[0.01, 0.2, 0.5, 0.8] {
            let y = m.apply(x);
            let direct = (psi_deriv(x) / psi_deriv(y)).ln();
            assert!((m.log_derivative(x) - direct).abs() < 1e-13);
        }
    }
}

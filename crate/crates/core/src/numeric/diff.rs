//! Finite-difference estimates of higher derivatives with Richardson
//! extrapolation over the step sequence h, h/2, h/4.

use crate::error::{Error, Result};

/// Highest derivative order estimated by differences.
pub const MAX_ORDER: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    Central,
    /// Points `x, x + h, ..., x + k h`.
    Forward,
    /// Points `x, x - h, ..., x - k h`.
    Backward,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// Plain k-th difference quotient with step `h`.
pub fn difference_quotient<G: Fn(f64) -> f64>(g: &G, x: f64, order: u32, stencil: Stencil, h: f64) -> f64 {
    let k = order;
    let mut acc = 0.0;
    for i in 0..=k {
        let c = binomial(k, i);
        let (sign, point) = match stencil {
            Stencil::Central => (
                if i % 2 == 0 { 1.0 } else { -1.0 },
                x + (f64::from(k) / 2.0 - f64::from(i)) * h,
            ),
            Stencil::Forward => (
                if (k - i).is_multiple_of(2) { 1.0 } else { -1.0 },
                x + f64::from(i) * h,
            ),
            Stencil::Backward => (if i % 2 == 0 { 1.0 } else { -1.0 }, x - f64::from(i) * h),
        };
        acc += sign * c * g(point);
    }
    acc / h.powi(k as i32)
}

/// Richardson-extrapolated k-th derivative from steps h, h/2, h/4.
pub fn richardson<G: Fn(f64) -> f64>(g: &G, x: f64, order: u32, stencil: Stencil, h: f64) -> Result<f64> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::Precision(format!(
            "derivative order {order} outside 1..={MAX_ORDER}"
        )));
    }
    let scale = h.powi(order as i32) / 16f64.powi(order as i32);
    if !(h > 0.0) || scale == 0.0 || !scale.is_finite() {
        return Err(Error::Precision(format!(
            "step {h:e} underflows for derivative order {order}"
        )));
    }
    let d0 = difference_quotient(g, x, order, stencil, h);
    let d1 = difference_quotient(g, x, order, stencil, h / 2.0);
    let d2 = difference_quotient(g, x, order, stencil, h / 4.0);
    // Central quotients have an even error expansion, one-sided ones a full one.
    let (r1, r2) = match stencil {
        Stencil::Central => (4.0, 16.0),
        Stencil::Forward | Stencil::Backward => (2.0, 4.0),
    };
    let e0 = (r1 * d1 - d0) / (r1 - 1.0);
    let e1 = (r1 * d2 - d1) / (r1 - 1.0);
    let est = (r2 * e1 - e0) / (r2 - 1.0);
    if est.is_finite() {
        Ok(est)
    } else {
        Err(Error::Precision(format!(
            "non-finite difference estimate at x={x} order {order}"
        )))
    }
}

/// Base step for a central stencil at interior `x` of `[lo, hi]`.
///
/// Starts from `1e-2 * min(x - lo, hi - x, 0.1)`, raised towards the
/// roundoff-balanced step `eps^(1/(k+2))` and capped so the widest stencil
/// stays inside the domain.
pub fn central_step(x: f64, lo: f64, hi: f64, order: u32) -> f64 {
    let margin = (x - lo).min(hi - x);
    let base = 1e-2 * margin.min(0.1);
    let balanced = f64::EPSILON.powf(1.0 / f64::from(order + 2));
    let cap = margin / f64::from(order.max(1));
    base.max(balanced).min(cap)
}

/// Step used for one-sided stencils anchored at an endpoint.
pub const ENDPOINT_STEP: f64 = 1e-3;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        let g = |x: f64| x.powi(5);
        // g'''(0.5) = 60 * 0.25 = 15
        let h = central_step(0.5, 0.0, 1.0, 3);
        let d = richardson(&g, 0.5, 3, Stencil::Central, h).unwrap();
        assert!((d - 15.0).abs() < 1e-4, "{d}");
    }

    #[test]
    fn one_sided_at_endpoint() {
        let g = |x: f64| x * x * (1.0 - x) * (1.0 - x);
        let d2 = richardson(&g, 0.0, 2, Stencil::Forward, ENDPOINT_STEP).unwrap();
        assert!((d2 - 2.0).abs() < 1e-6, "{d2}");
        let d2r = richardson(&g, 1.0, 2, Stencil::Backward, ENDPOINT_STEP).unwrap();
        assert!((d2r - 2.0).abs() < 1e-6, "{d2r}");
        let d1 = richardson(&g, 0.0, 1, Stencil::Forward, ENDPOINT_STEP).unwrap();
        assert!(d1.abs() < 1e-9);
    }

    #[test]
    fn order_cap() {
        assert!(richardson(&|x: f64| x, 0.5, 9, Stencil::Central, 0.01).is_err());
    }

    #[test]
    fn underflowing_step() {
        let err = richardson(&|x: f64| x, 1e-300, 8, Stencil::Central, 1e-302);
        assert!(matches!(err, Err(Error::Precision(_))));
    }
}

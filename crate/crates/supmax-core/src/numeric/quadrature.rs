//! Adaptive Simpson quadrature.
//!
//! The integrands in this crate are smooth, positive, and decay like `1/y^2`,
//! so plain adaptive Simpson with the usual Richardson correction is accurate
//! and cheap. Infinite upper limits are mapped to `[0, 1]` with the
//! substitution `y = lo + u/(1-u)`.

use crate::error::{Error, Result};
use crate::math;

/// Tolerances and budgets for adaptive Simpson integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Relative tolerance on the whole integral.
    pub rel_tol: f64,
    /// Absolute floor below which refinement stops.
    pub abs_floor: f64,
    /// Maximum recursion depth per panel.
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_floor: 1e-14,
            max_depth: 60,
        }
    }
}

#[inline]
fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

struct Panel<'a, F> {
    f: &'a F,
    max_depth: u32,
}

impl<'a, F: Fn(f64) -> f64> Panel<'a, F> {
    // Classic adaptive Simpson: accept when the two-half refinement moves the
    // estimate by at most 15*eps, then apply the Richardson correction.
    // Endpoint values ride along to avoid re-evaluating the integrand.
    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if math::abs(delta) <= 15.0 * eps {
            return Ok(left + right + delta / 15.0);
        }
        if depth >= self.max_depth {
            return Err(Error::Quadrature {
                lo: a,
                hi: b,
                estimate: left + right,
                detail: "max subdivision depth reached before meeting tolerance",
            });
        }
        let half_eps = 0.5 * eps;
        let l = self.refine(a, m, fa, flm, fm, left, half_eps, depth + 1)?;
        let r = self.refine(m, b, fm, frm, fb, right, half_eps, depth + 1)?;
        Ok(l + r)
    }
}

/// Integrate `f` over the finite interval `[lo, hi]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "interval",
            value: if lo.is_finite() { hi } else { lo },
            requirement: "finite integration bounds",
        });
    }
    if hi <= lo {
        return Ok(0.0);
    }
    let m = 0.5 * (lo + hi);
    let fa = f(lo);
    let fm = f(m);
    let fb = f(hi);
    // First refinement fixes the error scale before recursing.
    let lm = 0.5 * (lo + m);
    let rm = 0.5 * (m + hi);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - lo);
    let right = simpson(fm, frm, fb, hi - m);
    let scale = math::abs(left + right);
    let eps = (cfg.rel_tol * scale).max(cfg.abs_floor);
    let panel = Panel {
        f: &f,
        max_depth: cfg.max_depth,
    };
    let l = panel.refine(lo, m, fa, flm, fm, left, 0.5 * eps, 0)?;
    let r = panel.refine(m, hi, fm, frm, fb, right, 0.5 * eps, 0)?;
    Ok(l + r)
}

/// Integrate `f` over `[lo, +inf)` via the substitution `y = lo + u/(1-u)`.
///
/// The transformed integrand is `f(y) * (1 + (y - lo))^2`; it stays bounded
/// whenever `f` decays at least as fast as `1/y^2`, which holds for every
/// hazard-type integrand in this crate.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, lo: f64, cfg: &QuadratureConfig) -> Result<f64> {
    // u = 1 maps to y = inf; evaluate the transformed integrand at a huge but
    // finite offset instead, where it has already reached its limit value.
    const HUGE: f64 = 9.007_199_254_740_992e15; // 2^53
    let g = move |u: f64| {
        let t = if u >= 1.0 { HUGE } else { u / (1.0 - u) };
        let s = 1.0 + t;
        f(lo + t) * s * s
    };
    integrate(g, 0.0, 1.0, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let cfg = QuadratureConfig::default();
        let v = integrate(|x| x * x, 0.0, 3.0, &cfg).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_transcendental() {
        let cfg = QuadratureConfig::default();
        let v = integrate(|x| (-x).exp(), 0.0, 5.0, &cfg).unwrap();
        let exact = 1.0 - (-5.0f64).exp();
        assert!((v - exact).abs() < 1e-11, "v = {v}, exact = {exact}");
    }

    #[test]
    fn infinite_upper_limit() {
        let cfg = QuadratureConfig::default();
        // int_0^inf dy/(1+y)^2 = 1
        let v = integrate_to_inf(|y| 1.0 / ((1.0 + y) * (1.0 + y)), 0.0, &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "v = {v}");
        // int_2^inf dy/y^2 = 1/2
        let v = integrate_to_inf(|y| 1.0 / (y * y), 2.0, &cfg).unwrap();
        assert!((v - 0.5).abs() < 1e-10, "v = {v}");
    }

    #[test]
    fn empty_and_degenerate_intervals() {
        let cfg = QuadratureConfig::default();
        assert_eq!(integrate(|x| x, 1.0, 1.0, &cfg).unwrap(), 0.0);
        assert!(integrate(|x| x, 0.0, f64::INFINITY, &cfg).is_err());
    }
}

//! Analytic tail bounds and the closed-form tails of the two reference
//! constructions.
//!
//! For a process with initial value zero whose drift dominates `gamma` times
//! its quadratic-variation rate, the running supremum `Y*` obeys the tight
//! bound `P{Y* >= a} <= 1/(1 + gamma a)`. A single process can sit within a
//! factor five of that bound uniformly in `a`, giving the companion lower
//! bound `1/(5(1 + a gamma))`. Under stationary independent increments the
//! classical moment bound `E[Y*] <= 1/(2 gamma)` applies instead.

use crate::construction::BigJumpSpec;
use crate::error::{require, Result};
use crate::math;
use crate::target::JumpTargetFn;

/// Tight upper bound `1/(1 + gamma a)` on `P{Y* >= a}`.
pub fn bound_tail(gamma: f64, a: f64) -> Result<f64> {
    require(gamma >= 0.0, "gamma", gamma, "gamma >= 0")?;
    require(a >= 0.0, "a", a, "a >= 0")?;
    Ok(1.0 / (1.0 + gamma * a))
}

/// Uniform lower bound `1/(5(1 + a gamma))` achieved by the affine-target
/// construction with its flat-plateau parameter.
pub fn uniform_lower_bound(gamma: f64, a: f64) -> Result<f64> {
    require(gamma >= 0.0, "gamma", gamma, "gamma >= 0")?;
    require(a >= 0.0, "a", a, "a >= 0")?;
    Ok(1.0 / (5.0 * (1.0 + a * gamma)))
}

/// Moment bound for the stationary-independent-increments case:
/// `E[Y*] <= 1/(2 gamma)` and, via Markov, `P{Y* >= a} <= 1/(2 a gamma)`
/// (clamped to 1).
pub fn kingman_bounds(gamma: f64, a: f64) -> Result<(f64, f64)> {
    require(gamma > 0.0, "gamma", gamma, "gamma > 0")?;
    require(a > 0.0, "a", a, "a > 0")?;
    let mean_bound = 1.0 / (2.0 * gamma);
    let tail_bound = (1.0 / (2.0 * a * gamma)).min(1.0);
    Ok((mean_bound, tail_bound))
}

/// Tail of the constant-target construction evaluated at its own target:
/// `P{Y* >= a} = 1/(1 + a mu / sigma^2)`, meeting [`bound_tail`] with
/// equality at `gamma = mu/sigma^2`.
pub fn constant_target_tail(mu: f64, sigma2: f64, a: f64) -> Result<f64> {
    require(mu > 0.0, "mu", mu, "mu > 0")?;
    require(sigma2 > 0.0, "sigma2", sigma2, "sigma2 > 0")?;
    require(a >= 0.0, "a", a, "a >= 0")?;
    // Same code path as the bound so equality is exact, not just close.
    bound_tail(mu / sigma2, a)
}

/// Tail of the affine-target construction `h(y) = b + y`:
///
/// ```text
/// P{Y* >= a} = 1 - sqrt(mu b/(mu b + sigma^2))                          0 < a <= b
///            = sqrt(mu b/(mu b + sigma^2)) (sqrt(1 + sigma^2/(mu(2a-b))) - 1)   a >= b
/// ```
///
/// The two branches agree at `a = b`. The value at `a = 0` is defined by
/// continuity as the first branch value; the probability `P{Y* >= 0}` itself
/// is trivially 1 because the process starts at zero.
pub fn affine_target_tail(mu: f64, sigma2: f64, b: f64, a: f64) -> Result<f64> {
    require(mu > 0.0, "mu", mu, "mu > 0")?;
    require(sigma2 > 0.0, "sigma2", sigma2, "sigma2 > 0")?;
    require(b > 0.0, "b", b, "b > 0")?;
    require(a >= 0.0, "a", a, "a >= 0")?;
    let root = math::sqrt(mu * b / (mu * b + sigma2));
    if a <= b {
        Ok(1.0 - root)
    } else {
        Ok(root * (math::sqrt(1.0 + sigma2 / (mu * (2.0 * a - b))) - 1.0))
    }
}

/// The affine parameter `b = 16 sigma^2 / (9 mu)` that flattens the tail at
/// exactly 1/5 over `(0, b]` and keeps it above `1/(5(1 + a mu/sigma^2))`
/// for all larger `a`.
pub fn flat_plateau_b(mu: f64, sigma2: f64) -> Result<f64> {
    require(mu > 0.0, "mu", mu, "mu > 0")?;
    require(sigma2 > 0.0, "sigma2", sigma2, "sigma2 > 0")?;
    Ok(16.0 * sigma2 / (9.0 * mu))
}

/// Closed-form supremum tail of a constructed process, used as the analytic
/// reference column next to Monte Carlo estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormTail {
    /// `h == a`: the supremum is exactly `a` on jump paths and 0 otherwise.
    ConstantTarget { mu: f64, sigma2: f64, a: f64 },
    /// `h(y) = b + y`: the supremum exceeds `b` by the jump depth.
    AffineTarget { mu: f64, sigma2: f64, b: f64 },
}

impl ClosedFormTail {
    /// The closed form matching `spec`, when one exists.
    pub fn for_spec(spec: &BigJumpSpec) -> Option<Self> {
        match *spec.target() {
            JumpTargetFn::Constant(a) => Some(Self::ConstantTarget {
                mu: spec.mu(),
                sigma2: spec.sigma2(),
                a,
            }),
            JumpTargetFn::Affine(b) => Some(Self::AffineTarget {
                mu: spec.mu(),
                sigma2: spec.sigma2(),
                b,
            }),
            JumpTargetFn::Tabulated(_) => None,
        }
    }

    /// `P{Y* >= level}` for the constructed process.
    ///
    /// For the constant target this is a step function: 1 at level 0 (the
    /// process starts there), the tight-bound value on `(0, a]`, and 0 above
    /// `a`. For the affine target the `level = 0` value follows the branch
    /// convention documented on [`affine_target_tail`].
    pub fn eval(&self, level: f64) -> f64 {
        match *self {
            Self::ConstantTarget { mu, sigma2, a } => {
                if level <= 0.0 {
                    1.0
                } else if level <= a {
                    1.0 / (1.0 + a * mu / sigma2)
                } else {
                    0.0
                }
            }
            Self::AffineTarget { mu, sigma2, b } => {
                affine_target_tail(mu, sigma2, b, level.max(0.0)).unwrap_or(f64::NAN)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn tight_bound_values() {
        assert_eq!(bound_tail(1.0, 1.0).unwrap(), 0.5);
        assert_eq!(bound_tail(7.3, 0.0).unwrap(), 1.0);
        let v = bound_tail(0.5, 4.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        assert!(bound_tail(-0.1, 1.0).is_err());
        assert!(bound_tail(1.0, -2.0).is_err());
        assert!(bound_tail(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn uniform_lower_bound_values() {
        assert_eq!(uniform_lower_bound(1.0, 0.0).unwrap(), 0.2);
        let v = uniform_lower_bound(1.0, 10.0).unwrap();
        assert!((v - 1.0 / 55.0).abs() < 1e-15);
        assert_eq!(uniform_lower_bound(0.0, 5.0).unwrap(), 0.2);
        assert!(uniform_lower_bound(-1.0, 0.0).is_err());
    }

    #[test]
    fn kingman_bound_values() {
        let (m, t) = kingman_bounds(0.1, 10.0).unwrap();
        assert!((m - 5.0).abs() < 1e-12 && (t - 0.5).abs() < 1e-12);
        let (m, t) = kingman_bounds(1.0, 0.25).unwrap();
        assert!((m - 0.5).abs() < 1e-15);
        assert_eq!(t, 1.0); // clamped to a probability
        let (m, t) = kingman_bounds(0.5, 4.0).unwrap();
        assert!((m - 1.0).abs() < 1e-15 && (t - 0.25).abs() < 1e-15);
        assert!(kingman_bounds(0.0, 1.0).is_err());
        assert!(kingman_bounds(1.0, 0.0).is_err());
    }

    #[test]
    fn constant_target_tail_meets_bound_exactly() {
        assert_eq!(constant_target_tail(1.0, 1.0, 1.0).unwrap(), 0.5);
        let v = constant_target_tail(1.0, 2.0, 3.0).unwrap();
        assert!((v - 0.4).abs() < 1e-15);
        assert_eq!(constant_target_tail(2.5, 0.3, 0.0).unwrap(), 1.0);
        for &(mu, s2, a) in &[(1.0, 1.0, 1.0), (1.0, 2.0, 3.0), (2.0, 1.0, 0.5), (0.5, 2.0, 7.0)] {
            let tail = constant_target_tail(mu, s2, a).unwrap();
            let bound = bound_tail(mu / s2, a).unwrap();
            assert_eq!(tail.to_bits(), bound.to_bits());
        }
        assert!(constant_target_tail(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn affine_target_tail_values_and_continuity() {
        let b = 16.0 / 9.0;
        let v = affine_target_tail(1.0, 1.0, b, 1.0).unwrap();
        assert!((v - 0.2).abs() < 1e-15, "v = {v}");
        // Frozen from the closed form evaluated in extended precision.
        let v = affine_target_tail(1.0, 1.0, b, 10.0).unwrap();
        assert!((v - 0.021_658_050_054_590_65).abs() < 1e-15, "v = {v}");
        // Continuity at the branch point.
        let lo = affine_target_tail(1.0, 1.0, b, b - 1e-13).unwrap();
        let hi = affine_target_tail(1.0, 1.0, b, b + 1e-13).unwrap();
        assert!((lo - hi).abs() < 1e-12);
        assert!(affine_target_tail(1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn flat_plateau_values() {
        let b = flat_plateau_b(1.0, 1.0).unwrap();
        assert!((b - 16.0 / 9.0).abs() < 1e-15);
        let b2 = flat_plateau_b(2.0, 1.0).unwrap();
        assert!((b2 - 8.0 / 9.0).abs() < 1e-15);
        // The plateau really is flat at 1/5 on (0, b].
        for &a in &[1e-6, 0.5, 1.0, 1.5, b] {
            let v = affine_target_tail(1.0, 1.0, b, a).unwrap();
            assert!((v - 0.2).abs() < 1e-12, "a = {a}, v = {v}");
        }
    }

    #[test]
    fn bound_is_decreasing_and_convex() {
        let gamma = 0.7;
        let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.37).collect();
        for w in grid.windows(3) {
            let (f0, f1, f2) = (
                bound_tail(gamma, w[0]).unwrap(),
                bound_tail(gamma, w[1]).unwrap(),
                bound_tail(gamma, w[2]).unwrap(),
            );
            assert!(f1 < f0);
            assert!(f0 - 2.0 * f1 + f2 >= -1e-15, "second difference negative");
        }
    }

    #[test]
    fn example_tails_never_exceed_the_bound() {
        for &(mu, s2) in &[(0.5, 1.0), (1.0, 1.0), (2.0, 1.0), (1.0, 2.0)] {
            let gamma = mu / s2;
            for i in 0..60 {
                let a = 0.05 * (i as f64) * (i as f64);
                let bound = bound_tail(gamma, a).unwrap();
                let c = constant_target_tail(mu, s2, a).unwrap();
                assert!(c <= bound + 1e-12);
                if a > 0.0 {
                    let b = flat_plateau_b(mu, s2).unwrap();
                    let t = affine_target_tail(mu, s2, b, a).unwrap();
                    assert!(t <= bound + 1e-12, "a = {a}: {t} > {bound}");
                }
            }
        }
    }

    #[test]
    fn plateau_tail_dominates_uniform_lower_bound_on_log_grid() {
        let (mu, s2) = (1.0, 1.0);
        let gamma = mu / s2;
        let b = flat_plateau_b(mu, s2).unwrap();
        // log grid spanning (0, 1e4 * b]
        for i in 0..=200 {
            let a = b * 1e4f64.powf(i as f64 / 200.0) * 1e-4;
            let tail = affine_target_tail(mu, s2, b, a).unwrap();
            let lower = uniform_lower_bound(gamma, a).unwrap();
            assert!(tail >= lower - 1e-12, "a = {a}: {tail} < {lower}");
        }
    }

    #[test]
    fn plateau_proof_scalar_inequality() {
        // (1 + x/2)^(1/2) - 1 >= x/(4(1+x)) for x > 0, checked on a log grid.
        for i in -30..=30 {
            let x = 10f64.powf(i as f64 / 10.0);
            let lhs = (1.0 + 0.5 * x).sqrt() - 1.0;
            let rhs = x / (4.0 * (1.0 + x));
            assert!(lhs >= rhs, "x = {x}: {lhs} < {rhs}");
        }
    }

    #[test]
    fn closed_form_tail_is_monotone_and_bounded() {
        let t = ClosedFormTail::ConstantTarget {
            mu: 1.0,
            sigma2: 1.0,
            a: 1.0,
        };
        assert_eq!(t.eval(0.0), 1.0);
        assert_eq!(t.eval(0.5), 0.5);
        assert_eq!(t.eval(1.0), 0.5);
        assert_eq!(t.eval(1.0 + 1e-12), 0.0);
        let t = ClosedFormTail::AffineTarget {
            mu: 1.0,
            sigma2: 1.0,
            b: 16.0 / 9.0,
        };
        let mut prev = t.eval(1e-9);
        for i in 1..300 {
            let level = i as f64 * 0.1;
            let v = t.eval(level);
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }
}

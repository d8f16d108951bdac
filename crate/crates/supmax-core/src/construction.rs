//! The big-jump construction.
//!
//! A process descends deterministically from zero along `-y(t)`, where
//!
//! ```text
//! dy/dt = mu + sigma^2 / (y + h(y)),    y(0) = 0,
//! ```
//!
//! until a random time `T` with hazard rate `kappa(y) = sigma^2/(y + h(y))^2`
//! along the descent, at which point it jumps up to `h(y(T))` and afterwards
//! drifts down at rate `mu`. The hazard is exactly calibrated so that the
//! conditional mean and second moment of increments are `-mu eta + o(eta)`
//! and `sigma^2 eta + o(eta)`: the process drifts down at rate `mu` while
//! generating quadratic variation at rate `sigma^2`, the regime in which the
//! `1/(1 + gamma a)` supremum bound is tight for `gamma = mu/sigma^2`.
//!
//! This module holds the deterministic mathematics: descent speed, hazard,
//! the time/depth change of variables, and the cumulative hazard
//!
//! ```text
//! I(c) = integral_0^c kappa(y) { mu + sigma^2/(y + h(y)) }^-1 dy,
//! ```
//!
//! so that `P{T >= t} = exp(-I(y(t)))`. The quadrature-backed methods here
//! are deliberately independent of the closed-form evaluator in
//! [`crate::law`]; tests hold the two routes against each other.

use alloc::vec::Vec;

use crate::error::{require, Error, Result};
use crate::numeric::{invert_increasing, quadrature, QuadratureConfig};
use crate::target::JumpTargetFn;

/// A nonnegative time that may be infinite (a jump that never happens).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedTime {
    Finite(f64),
    Infinite,
}

impl ExtendedTime {
    pub fn finite(value: f64) -> Result<Self> {
        require(value >= 0.0 && value.is_finite(), "time", value, "finite and >= 0")?;
        Ok(ExtendedTime::Finite(value))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedTime::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            ExtendedTime::Finite(t) => Some(*t),
            ExtendedTime::Infinite => None,
        }
    }
}

impl core::fmt::Display for ExtendedTime {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ExtendedTime::Finite(t) => write!(f, "{t}"),
            ExtendedTime::Infinite => write!(f, "inf"),
        }
    }
}

/// Parameters of one big-jump process: downward drift rate `mu`, variation
/// rate `sigma2`, and the jump target function `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct BigJumpSpec {
    mu: f64,
    sigma2: f64,
    target: JumpTargetFn,
    quad: QuadratureConfig,
}

impl BigJumpSpec {
    pub fn new(mu: f64, sigma2: f64, target: JumpTargetFn) -> Result<Self> {
        require(mu > 0.0 && mu.is_finite(), "mu", mu, "finite and > 0")?;
        require(sigma2 > 0.0 && sigma2.is_finite(), "sigma2", sigma2, "finite and > 0")?;
        target.validate()?;
        Ok(Self {
            mu,
            sigma2,
            target,
            quad: QuadratureConfig::default(),
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// The drift-to-variation ratio `gamma = mu / sigma2`, always derived.
    pub fn gamma(&self) -> f64 {
        self.mu / self.sigma2
    }

    pub fn target(&self) -> &JumpTargetFn {
        &self.target
    }

    #[inline]
    fn w(&self, y: f64) -> Result<f64> {
        let w = y + self.target.eval(y);
        if w <= 0.0 {
            return Err(Error::DegenerateTarget);
        }
        Ok(w)
    }

    /// Descent speed `dy/dt = mu + sigma^2/(y + h(y))`; always above `mu`.
    pub fn drift_rate(&self, y: f64) -> Result<f64> {
        require(y >= 0.0, "y", y, "y >= 0")?;
        Ok(self.mu + self.sigma2 / self.w(y)?)
    }

    /// Jump hazard `kappa(y) = sigma^2/(y + h(y))^2` along the descent.
    pub fn hazard_rate(&self, y: f64) -> Result<f64> {
        require(y >= 0.0, "y", y, "y >= 0")?;
        let w = self.w(y)?;
        Ok(self.sigma2 / (w * w))
    }

    /// Interior tabulated knots in `(lo, hi)`, where the integrands lose
    /// smoothness; quadrature panels split there.
    fn knot_splits(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut cuts = Vec::new();
        if let JumpTargetFn::Tabulated(knots) = &self.target {
            for &(y, _) in knots {
                if y > lo && y < hi {
                    cuts.push(y);
                }
            }
        }
        cuts
    }

    fn last_knot(&self) -> f64 {
        match &self.target {
            JumpTargetFn::Tabulated(knots) => knots[knots.len() - 1].0,
            _ => 0.0,
        }
    }

    fn integrate_split<F: Fn(f64) -> f64 + Copy>(&self, f: F, lo: f64, hi: f64) -> Result<f64> {
        let mut total = 0.0;
        let mut left = lo;
        for cut in self.knot_splits(lo, hi) {
            total += quadrature::integrate(f, left, cut, &self.quad)?;
            left = cut;
        }
        total += quadrature::integrate(f, left, hi, &self.quad)?;
        Ok(total)
    }

    /// Time for the descent to reach depth `c`:
    /// `t(c) = integral_0^c dz / drift_rate(z)`, strictly increasing with
    /// `t(0) = 0`. Inverse of the descent path `y(t)`.
    pub fn time_of_depth(&self, c: f64) -> Result<f64> {
        require(c >= 0.0 && c.is_finite(), "c", c, "finite and >= 0")?;
        let mu = self.mu;
        let s2 = self.sigma2;
        let target = &self.target;
        let f = move |z: f64| {
            let w = z + target.eval(z);
            1.0 / (mu + s2 / w)
        };
        self.integrate_split(f, 0.0, c)
    }

    /// Depth reached by the descent at time `t`; inverts [`Self::time_of_depth`]
    /// by bracketed bisection.
    pub fn depth_at_time(&self, t: f64) -> Result<f64> {
        require(t >= 0.0 && t.is_finite(), "t", t, "finite and >= 0")?;
        if t == 0.0 {
            return Ok(0.0);
        }
        invert_increasing(|c| self.time_of_depth(c), t)
    }

    /// Cumulative hazard reparameterized by depth,
    /// `I(c) = integral_0^c kappa(y) {mu + sigma^2/(y+h(y))}^-1 dy`.
    /// Accepts `c = +inf`; the total hazard is finite for every valid target,
    /// so the no-jump event `exp(-I(inf))` has positive probability.
    pub fn cumulative_hazard(&self, c: f64) -> Result<f64> {
        if c.is_nan() || c < 0.0 {
            return Err(Error::InvalidParameter {
                name: "c",
                value: c,
                requirement: ">= 0 (may be +inf)",
            });
        }
        let mu = self.mu;
        let s2 = self.sigma2;
        let target = &self.target;
        let f = move |y: f64| {
            let w = y + target.eval(y);
            s2 / (w * (mu * w + s2))
        };
        if c.is_finite() {
            self.integrate_split(f, 0.0, c)
        } else {
            // Split at the knots, then map the smooth tail to [0, 1].
            let head_end = self.last_knot();
            let head = if head_end > 0.0 {
                self.integrate_split(f, 0.0, head_end)?
            } else {
                0.0
            };
            let tail = quadrature::integrate_to_inf(f, head_end, &self.quad)?;
            Ok(head + tail)
        }
    }
}

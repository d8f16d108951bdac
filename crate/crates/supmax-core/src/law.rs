//! Exact piecewise closed forms for the descent law.
//!
//! On any stretch where the jump target `h` is linear with slope `beta`, the
//! combined coordinate `w = y + h(y)` is linear in `y` with slope
//! `dw = 1 + beta`, and both descent integrals have elementary
//! antiderivatives in `w`:
//!
//! ```text
//! I(y)  = I_lo + [ln(w/(mu w + s2)) - ln(w_lo/(mu w_lo + s2))] / dw
//! t(y)  = t_lo + [(w - w_lo) - (s2/mu)(ln(mu w + s2) - ln(mu w_lo + s2))] / (dw mu)
//! ```
//!
//! Every supported target (constant, affine, tabulated piecewise-linear) is
//! linear between finitely many knots, so the whole law is a short table of
//! segments with exact prefix values. This is what the exact sampler inverts:
//! solving `I(c) = e` within a segment is a single `exp`, so sampling carries
//! no quadrature or discretization error. The quadrature route in
//! [`crate::construction`] computes the same quantities independently and is
//! held against this one in tests.

use alloc::vec::Vec;

use crate::construction::BigJumpSpec;
use crate::math;
use crate::numeric::invert_increasing;
use crate::target::JumpTargetFn;

#[derive(Debug, Clone, Copy)]
struct Segment {
    y_lo: f64,
    w_lo: f64,
    /// `dw/dy = 1 + h'` on this stretch; at least 1 for nondecreasing `h`.
    dw: f64,
    /// Cumulative hazard at `y_lo`.
    haz_lo: f64,
    /// Descent time at `y_lo`.
    time_lo: f64,
    /// `ln(w_lo / (mu w_lo + s2))`, cached.
    lr_lo: f64,
}

/// Exact evaluator for one construction's descent law.
#[derive(Debug, Clone)]
pub struct JumpLaw {
    mu: f64,
    s2: f64,
    segments: Vec<Segment>,
    total_hazard: f64,
}

impl JumpLaw {
    pub fn new(spec: &BigJumpSpec) -> Self {
        let mu = spec.mu();
        let s2 = spec.sigma2();
        // (y_lo, dw) breakpoints of w(y) = y + h(y)
        let mut pieces: Vec<(f64, f64)> = Vec::new();
        match spec.target() {
            JumpTargetFn::Constant(_) => pieces.push((0.0, 1.0)),
            JumpTargetFn::Affine(_) => pieces.push((0.0, 2.0)),
            JumpTargetFn::Tabulated(knots) => {
                if knots[0].0 > 0.0 {
                    pieces.push((0.0, 1.0));
                }
                for w in knots.windows(2) {
                    let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                    pieces.push((w[0].0, 1.0 + slope));
                }
                let last = knots[knots.len() - 1];
                pieces.push((last.0, 1.0));
            }
        }

        let lr = |w: f64| math::ln(w) - math::ln(mu * w + s2);
        let mut segments = Vec::with_capacity(pieces.len());
        let mut haz = 0.0;
        let mut time = 0.0;
        let mut w_lo = spec.target().eval(0.0); // w(0) = 0 + h(0)
        for (idx, &(y_lo, dw)) in pieces.iter().enumerate() {
            let seg = Segment {
                y_lo,
                w_lo,
                dw,
                haz_lo: haz,
                time_lo: time,
                lr_lo: lr(w_lo),
            };
            segments.push(seg);
            if let Some(&(y_next, _)) = pieces.get(idx + 1) {
                let w_next = seg.w_lo + seg.dw * (y_next - seg.y_lo);
                haz = seg.haz_lo + (lr(w_next) - seg.lr_lo) / seg.dw;
                time = seg.time_lo
                    + ((w_next - seg.w_lo) - (s2 / mu) * (math::ln(mu * w_next + s2) - math::ln(mu * seg.w_lo + s2)))
                        / (seg.dw * mu);
                w_lo = w_next;
            }
        }
        let last = segments[segments.len() - 1];
        // lr(w) -> ln(1/mu) as w -> inf
        let total_hazard = last.haz_lo + (-math::ln(mu) - last.lr_lo) / last.dw;
        Self {
            mu,
            s2,
            segments,
            total_hazard,
        }
    }

    /// Total hazard `I(inf)`; `exp(-I(inf))` is the no-jump probability.
    pub fn total_hazard(&self) -> f64 {
        self.total_hazard
    }

    fn segment_for_depth(&self, c: f64) -> &Segment {
        let idx = self.segments.partition_point(|seg| seg.y_lo <= c);
        &self.segments[idx.saturating_sub(1).min(self.segments.len() - 1)]
    }

    #[inline]
    fn w_at(&self, seg: &Segment, y: f64) -> f64 {
        seg.w_lo + seg.dw * (y - seg.y_lo)
    }

    /// Exact `I(c)`; accepts `c = +inf`.
    pub fn cumulative_hazard(&self, c: f64) -> f64 {
        if c == 0.0 {
            return 0.0;
        }
        if c.is_infinite() {
            return self.total_hazard;
        }
        let seg = self.segment_for_depth(c);
        let w = self.w_at(seg, c);
        seg.haz_lo + (math::ln(w) - math::ln(self.mu * w + self.s2) - seg.lr_lo) / seg.dw
    }

    /// Exact descent time `t(c)`.
    pub fn time_of_depth(&self, c: f64) -> f64 {
        if c == 0.0 {
            return 0.0;
        }
        let seg = self.segment_for_depth(c);
        let w = self.w_at(seg, c);
        seg.time_lo
            + ((w - seg.w_lo) - (self.s2 / self.mu) * (math::ln(self.mu * w + self.s2) - math::ln(self.mu * seg.w_lo + self.s2)))
                / (seg.dw * self.mu)
    }

    /// Depth `c` with `I(c) = e`, or `None` when `e >= I(inf)` (no jump).
    /// Exact within each segment: one `exp` inverts the hazard antiderivative.
    pub fn depth_for_hazard(&self, e: f64) -> Option<f64> {
        if e >= self.total_hazard {
            return None;
        }
        if e <= 0.0 {
            return Some(0.0);
        }
        let idx = self.segments.partition_point(|seg| seg.haz_lo <= e);
        let seg = &self.segments[idx.saturating_sub(1).min(self.segments.len() - 1)];
        let r = math::exp(seg.lr_lo + seg.dw * (e - seg.haz_lo));
        // r < 1/mu is guaranteed by e < I(inf); when e sits within an ulp of
        // the total the denominator can still round to zero, and that tie
        // resolves to the no-jump side like e >= I(inf) itself
        let w = r * self.s2 / (1.0 - r * self.mu);
        if !w.is_finite() {
            return None;
        }
        Some(seg.y_lo + (w - seg.w_lo) / seg.dw)
    }

    /// Depth reached at time `t`, by bisection on the exact time map of the
    /// enclosing segment.
    pub fn depth_at_time(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let idx = self.segments.partition_point(|seg| seg.time_lo <= t);
        let seg = self.segments[idx.saturating_sub(1).min(self.segments.len() - 1)];
        let mu = self.mu;
        let s2 = self.s2;
        let time_in_seg = move |x: f64| {
            let w = seg.w_lo + seg.dw * x;
            Ok(((w - seg.w_lo) - (s2 / mu) * (math::ln(mu * w + s2) - math::ln(mu * seg.w_lo + s2))) / (seg.dw * mu))
        };
        // monotone and defined for all x >= 0, so bracket growth always lands
        let x = invert_increasing(time_in_seg, t - seg.time_lo)
            .expect("segment time map is monotone with f(0) = 0");
        seg.y_lo + x
    }
}

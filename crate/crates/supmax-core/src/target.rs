//! Jump target functions: the nondecreasing `h` that maps the descent depth
//! at the jump time to the post-jump level.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// The jump target `h : [0, inf) -> [0, inf)`.
///
/// Validity requires `h` nondecreasing, `h >= 0`, and `y + h(y) > 0` for all
/// `y >= 0`; the last condition reduces to `h(0) > 0` and is what keeps the
/// descent speed and the hazard finite.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpTargetFn {
    /// `h(y) = a`.
    Constant(f64),
    /// `h(y) = b + y`.
    Affine(f64),
    /// Piecewise-linear interpolation through `(y, h(y))` knots, constant
    /// beyond the first and last knot.
    Tabulated(Vec<(f64, f64)>),
}

impl JumpTargetFn {
    pub fn validate(&self) -> Result<()> {
        match self {
            JumpTargetFn::Constant(a) => {
                if !a.is_finite() || *a < 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "a",
                        value: *a,
                        requirement: "finite and >= 0",
                    });
                }
                if *a == 0.0 {
                    return Err(Error::DegenerateTarget);
                }
                Ok(())
            }
            JumpTargetFn::Affine(b) => {
                if !b.is_finite() || *b <= 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "b",
                        value: *b,
                        requirement: "finite and > 0",
                    });
                }
                Ok(())
            }
            JumpTargetFn::Tabulated(knots) => {
                if knots.is_empty() {
                    return Err(Error::InvalidTable("no knots"));
                }
                for &(y, h) in knots {
                    if !y.is_finite() || !h.is_finite() {
                        return Err(Error::InvalidTable("non-finite knot"));
                    }
                    if y < 0.0 {
                        return Err(Error::InvalidTable("knot ordinate below zero"));
                    }
                    if h < 0.0 {
                        return Err(Error::InvalidTable("negative target value"));
                    }
                }
                for w in knots.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::InvalidTable("knot ordinates must be strictly increasing"));
                    }
                    if w[1].1 < w[0].1 {
                        return Err(Error::InvalidTable("target values must be nondecreasing"));
                    }
                }
                // Constant extrapolation below the first knot makes h(0) the
                // first target value.
                if knots[0].1 == 0.0 {
                    return Err(Error::DegenerateTarget);
                }
                Ok(())
            }
        }
    }

    /// Evaluate `h(y)` for `y >= 0`.
    pub fn eval(&self, y: f64) -> f64 {
        match self {
            JumpTargetFn::Constant(a) => *a,
            JumpTargetFn::Affine(b) => b + y,
            JumpTargetFn::Tabulated(knots) => {
                let first = knots[0];
                if y <= first.0 {
                    return first.1;
                }
                let last = knots[knots.len() - 1];
                if y >= last.0 {
                    return last.1;
                }
                // binary search for the bracketing pair
                let idx = knots.partition_point(|&(ky, _)| ky <= y);
                let (y0, h0) = knots[idx - 1];
                let (y1, h1) = knots[idx];
                h0 + (h1 - h0) * (y - y0) / (y1 - y0)
            }
        }
    }

    /// Right-hand slope `h'(y+)`, used by the drift expansion coefficients.
    pub fn slope_right(&self, y: f64) -> f64 {
        match self {
            JumpTargetFn::Constant(_) => 0.0,
            JumpTargetFn::Affine(_) => 1.0,
            JumpTargetFn::Tabulated(knots) => {
                let last = knots[knots.len() - 1];
                if y >= last.0 {
                    return 0.0;
                }
                if y < knots[0].0 {
                    return 0.0;
                }
                let idx = knots.partition_point(|&(ky, _)| ky <= y);
                let (y0, h0) = knots[idx - 1];
                let (y1, h1) = knots[idx];
                (h1 - h0) / (y1 - y0)
            }
        }
    }

    /// True when `h` is strictly increasing everywhere it is defined, which
    /// is when the level map `c -> h(c)` is invertible.
    pub fn is_strictly_increasing(&self) -> bool {
        match self {
            JumpTargetFn::Constant(_) => false,
            JumpTargetFn::Affine(_) => true,
            JumpTargetFn::Tabulated(knots) => {
                knots.len() >= 2 && knots.windows(2).all(|w| w[1].1 > w[0].1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constant_zero_is_degenerate() {
        assert_eq!(JumpTargetFn::Constant(0.0).validate(), Err(Error::DegenerateTarget));
        assert!(JumpTargetFn::Constant(1.0).validate().is_ok());
        assert!(JumpTargetFn::Constant(-1.0).validate().is_err());
    }

    #[test]
    fn affine_requires_positive_offset() {
        assert!(JumpTargetFn::Affine(0.5).validate().is_ok());
        assert!(JumpTargetFn::Affine(0.0).validate().is_err());
        assert!(JumpTargetFn::Affine(f64::NAN).validate().is_err());
    }

    #[test]
    fn tabulated_validation() {
        let ok = JumpTargetFn::Tabulated(vec![(0.0, 1.0), (1.0, 2.0), (3.0, 2.5)]);
        assert!(ok.validate().is_ok());
        let unsorted = JumpTargetFn::Tabulated(vec![(1.0, 1.0), (0.5, 2.0)]);
        assert!(unsorted.validate().is_err());
        let decreasing = JumpTargetFn::Tabulated(vec![(0.0, 2.0), (1.0, 1.0)]);
        assert!(decreasing.validate().is_err());
        let degenerate = JumpTargetFn::Tabulated(vec![(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(degenerate.validate(), Err(Error::DegenerateTarget));
        assert!(JumpTargetFn::Tabulated(vec![]).validate().is_err());
    }

    #[test]
    fn tabulated_interpolation_and_extrapolation() {
        let h = JumpTargetFn::Tabulated(vec![(1.0, 2.0), (3.0, 4.0)]);
        assert_eq!(h.eval(0.0), 2.0); // constant below the first knot
        assert_eq!(h.eval(1.0), 2.0);
        assert_eq!(h.eval(2.0), 3.0); // linear in between
        assert_eq!(h.eval(3.0), 4.0);
        assert_eq!(h.eval(100.0), 4.0); // constant beyond the last knot
        assert_eq!(h.slope_right(2.0), 1.0);
        assert_eq!(h.slope_right(10.0), 0.0);
    }

    #[test]
    fn strict_monotonicity_flag() {
        assert!(!JumpTargetFn::Constant(1.0).is_strictly_increasing());
        assert!(JumpTargetFn::Affine(1.0).is_strictly_increasing());
        let flat = JumpTargetFn::Tabulated(vec![(0.0, 1.0), (1.0, 1.0)]);
        assert!(!flat.is_strictly_increasing());
        let strict = JumpTargetFn::Tabulated(vec![(0.0, 1.0), (1.0, 2.0)]);
        assert!(strict.is_strictly_increasing());
    }
}

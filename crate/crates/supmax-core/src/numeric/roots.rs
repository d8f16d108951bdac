//! Bracketed bisection for monotone functions.
//!
//! Every inversion in this crate (depth from time, depth from cumulative
//! hazard) targets a continuous nondecreasing function on `[0, inf)`, so
//! bisection with geometric bracket growth is both sufficient and robust.

use crate::error::{Error, Result};
use crate::math;

const MAX_ITER: u32 = 200;
const REL_TOL: f64 = 1e-12;

/// Solve `f(x) = target` for a continuous nondecreasing `f` on `[0, inf)`
/// with `f(0) <= target`. The bracket starts at `[0, 1]` and doubles until it
/// encloses the root.
pub fn invert_increasing<F>(mut f: F, target: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if f(0.0)? >= target {
        return Ok(0.0);
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut grow = 0;
    while f(hi)? < target {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::Inversion("bracket growth exhausted (root beyond 2^200)"));
        }
    }
    bisect_in(f, target, lo, hi)
}

/// Bisection on a known bracket `[lo, hi]` with `f(lo) <= target <= f(hi)`.
pub fn bisect_in<F>(mut f: F, target: f64, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= REL_TOL * math::abs(mid).max(1.0) {
            return Ok(mid);
        }
        if f(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

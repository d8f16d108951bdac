//! Deterministic replicate-parallel reduction.
//!
//! Estimators map a replicate index to a small accumulator and merge the
//! results along a binary tree that is fixed by the replicate count alone.
//! Counts are integers; floating-point sums always combine in the same tree
//! order, so a serial run and any parallel run produce identical bits. The
//! [`Join`] trait is the only scheduling hook: `Serial` runs both branches in
//! place, and an executor such as rayon can run them concurrently.

/// Scheduling hook for the two halves of a reduction node.
pub trait Join {
    fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        RA: Send,
        RB: Send;
}

/// Runs both branches on the current thread.
pub struct Serial;

impl Join for Serial {
    #[inline]
    fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        RA: Send,
        RB: Send,
    {
        (a(), b())
    }
}

/// Accumulators that combine associatively in tree order.
pub trait Merge: Send + Sized {
    fn merge(self, other: Self) -> Self;
}

/// Replicates per leaf of the reduction tree.
pub const BLOCK: u64 = 1024;

/// Map `kernel` over `0..n` and merge along the fixed tree. Returns `None`
/// when `n == 0`.
pub fn map_reduce<J, T, F>(n: u64, kernel: &F) -> Option<T>
where
    J: Join,
    T: Merge,
    F: Fn(u64) -> T + Sync,
{
    if n == 0 {
        return None;
    }
    Some(reduce_range::<J, T, F>(0, n, kernel))
}

fn reduce_range<J, T, F>(lo: u64, hi: u64, kernel: &F) -> T
where
    J: Join,
    T: Merge,
    F: Fn(u64) -> T + Sync,
{
    if hi - lo <= BLOCK {
        let mut acc = kernel(lo);
        for i in lo + 1..hi {
            acc = acc.merge(kernel(i));
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    let (a, b) = J::join(
        || reduce_range::<J, T, F>(lo, mid, kernel),
        || reduce_range::<J, T, F>(mid, hi, kernel),
    );
    a.merge(b)
}

/// Bernoulli counter.
#[derive(Debug, Clone, Copy, Default)]
pub struct CountAccum {
    pub trials: u64,
    pub hits: u64,
}

impl CountAccum {
    #[inline]
    pub fn from_outcome(hit: bool) -> Self {
        Self {
            trials: 1,
            hits: hit as u64,
        }
    }
}

impl Merge for CountAccum {
    #[inline]
    fn merge(self, other: Self) -> Self {
        Self {
            trials: self.trials + other.trials,
            hits: self.hits + other.hits,
        }
    }
}

/// First and second moment accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct MomentAccum {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl MomentAccum {
    #[inline]
    pub fn from_value(x: f64) -> Self {
        Self {
            n: 1,
            sum: x,
            sum_sq: x * x,
        }
    }
}

impl Merge for MomentAccum {
    #[inline]
    fn merge(self, other: Self) -> Self {
        Self {
            n: self.n + other.n,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_all_replicates() {
        let acc = map_reduce::<Serial, _, _>(10_000, &|i| CountAccum::from_outcome(i % 3 == 0)).unwrap();
        assert_eq!(acc.trials, 10_000);
        assert_eq!(acc.hits, 3334);
    }

    #[test]
    fn empty_input_yields_none() {
        assert!(map_reduce::<Serial, CountAccum, _>(0, &|_| CountAccum::default()).is_none());
    }

    #[test]
    fn moment_sum_is_stable_across_equivalent_serial_runs() {
        let f = |i: u64| MomentAccum::from_value((i as f64).sin());
        let a = map_reduce::<Serial, _, _>(100_000, &f).unwrap();
        let b = map_reduce::<Serial, _, _>(100_000, &f).unwrap();
        assert_eq!(a.sum.to_bits(), b.sum.to_bits());
        assert_eq!(a.sum_sq.to_bits(), b.sum_sq.to_bits());
    }
}

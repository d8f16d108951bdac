//! Rayon-backed scheduler for the core's deterministic reductions.
//!
//! The reduction tree is fixed by the replicate count, so results are
//! bit-identical for any worker count; threads only change wall time.

use supmax_core::Join;

pub struct RayonJoin;

impl Join for RayonJoin {
    #[inline]
    fn join<A, B, RA, RB>(a: A, b: B) -> (RA, RB)
    where
        A: FnOnce() -> RA + Send,
        B: FnOnce() -> RB + Send,
        RA: Send,
        RB: Send,
    {
        rayon::join(a, b)
    }
}

/// Run `f` in a pool of `threads` workers (default: rayon's global pool,
/// sized to the machine).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        None => f(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .expect("thread pool")
            .install(f),
    }
}

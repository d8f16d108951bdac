//! Fixed-order pairwise summation.
//!
//! The reduction tree depends only on the slice length, so any two runs over
//! the same data produce bit-identical sums regardless of how the work is
//! scheduled elsewhere.

const BASE: usize = 32;

/// Sum `xs` by recursive halving with a sequential base case.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= BASE {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn matches_naive_on_small_input() {
        let xs: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 55.0);
    }

    #[test]
    fn more_accurate_than_naive_for_ill_conditioned_sum() {
        // Alternating large/small values accumulate rounding error in a naive
        // left fold; the pairwise tree keeps partial sums balanced.
        let n = 1 << 16;
        let xs: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0e16 } else { 1.0 }).collect();
        let pair = pairwise_sum(&xs);
        let expect = (n as f64 / 2.0) * 1.0e16 + (n as f64 / 2.0);
        assert!((pair - expect).abs() <= (expect * 1e-12).abs());
    }
}

//! Interval estimates and distribution-distance statistics used by the
//! verification layer.

use crate::error::{require, Result};
use crate::math;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959963984540054;

/// A binomial proportion with its Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proportion {
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Wilson score interval at confidence level given by `z`.
///
/// Chosen over the normal approximation because it keeps sensible coverage
/// near 0 and 1, where the tight tail bounds of interest live.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<Proportion> {
    require(trials >= 1, "trials", trials as f64, "at least one trial")?;
    require(
        successes <= trials,
        "successes",
        successes as f64,
        "no more successes than trials",
    )?;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * math::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // The exact Wilson limits are 0 and 1 at the degenerate counts; make
    // that exact rather than within an ulp.
    let ci_low = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let ci_high = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    Ok(Proportion {
        trials,
        successes,
        p_hat: p,
        ci_low,
        ci_high,
    })
}

/// A sample mean with normal-approximation confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub n: u64,
    pub mean: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Mean and CI from accumulated first and second moments.
pub fn mean_estimate(n: u64, sum: f64, sum_sq: f64, z: f64) -> Result<MeanEstimate> {
    require(n >= 1, "n", n as f64, "at least one observation")?;
    let nf = n as f64;
    let mean = sum / nf;
    // sample variance (n-1 correction) from accumulated moments
    let var = if n > 1 {
        ((sum_sq - sum * sum / nf) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    let se = math::sqrt(var / nf);
    Ok(MeanEstimate {
        n,
        mean,
        se,
        ci_low: mean - z * se,
        ci_high: mean + z * se,
    })
}

/// One-sample Kolmogorov-Smirnov statistic of `sorted` against `cdf`.
///
/// `sorted` must be ascending; the statistic is the usual
/// `max_i max(|F(x_i) - i/n|, |F(x_i) - (i-1)/n|)`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> Result<f64> {
    require(!sorted.is_empty(), "sample", 0.0, "nonempty sample")?;
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let hi = (i as f64 + 1.0) / n;
        let lo = i as f64 / n;
        d = d.max(math::abs(f - hi)).max(math::abs(f - lo));
    }
    Ok(d)
}

/// Asymptotic one-sample KS critical value at the 1% level,
/// `sqrt(-ln(alpha/2)/2) / sqrt(n)` with `alpha = 0.01`.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_623_630_718_729_3 / math::sqrt(n as f64)
}

/// Standard normal quantile (Acklam's rational approximation, relative error
/// below 1.2e-9 on (0, 1)). Used to widen per-bin intervals when one report
/// aggregates many bins.
pub fn normal_quantile(p: f64) -> Result<f64> {
    require(p > 0.0 && p < 1.0, "p", p, "0 < p < 1")?;
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    let x = if p < P_LOW {
        let q = math::sqrt(-2.0 * math::ln(p));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = math::sqrt(-2.0 * math::ln(1.0 - p));
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    Ok(x)
}

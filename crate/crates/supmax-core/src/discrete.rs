//! Discrete-time counterpart: the sampled-at-integers construction, its
//! feasibility arithmetic, a conditional-drift condition checker, and the
//! negative-drift random-walk comparator for the moment bound.
//!
//! For a chain `S` with increments `U_k` such that
//! `S_k + gamma sum U_j^2` is a supermartingale, the same tail bound
//! `P{S* >= a} <= 1/(1 + gamma a)` holds, and it is approached within any
//! `eps > 0` by sampling a continuous constant-target construction with
//! shrunken drift `mu_tilde` at integer times. The variance budget
//! `sigma2_tilde = mu_tilde/gamma - mu_tilde^2` makes the compensated chain a
//! martingale up to the jump, and the post-jump path is replaced by a
//! straight descent at slope `-mu_tilde` so the chain still registers the hit
//! at step `ceil(T)`.

use alloc::vec::Vec;
use rand_chacha::rand_core::RngCore;

use crate::bounds::bound_tail;
use crate::construction::BigJumpSpec;
use crate::error::{require, Error, Result};
use crate::mc::{map_reduce, CountAccum, Join, MomentAccum, Serial};
use crate::rng::{unit_half_open, RngPolicy};
use crate::simulate::{PathSampler, TailEstimate};
use crate::stats::{mean_estimate, wilson_interval, Z_95};
use crate::target::JumpTargetFn;
use crate::verify::{DriftBin, DriftReport, Verdict};

/// Steps emitted for a replicate whose jump never happens; the hit decision
/// never needs them, they only give diagnostics a window of descent values.
const NO_JUMP_STEPS: u64 = 32;

/// Hard cap on emitted pre-jump steps. Jump depths have a `1/c` tail, so a
/// rare replicate can legitimately jump after billions of steps; the chain
/// then reports `hit` and `jump_step` exactly but truncates `values` here
/// instead of materializing them.
const MAX_CHAIN_STEPS: u64 = 100_000;

/// Parameters of the sampled construction for level `a` and rate `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteConstructionParams {
    gamma: f64,
    a: f64,
    mu_tilde: f64,
    sigma2_tilde: f64,
    a_tilde: f64,
}

impl DiscreteConstructionParams {
    /// Derive `sigma2_tilde = mu_tilde/gamma - mu_tilde^2` and
    /// `a_tilde = a + mu_tilde`; fails when the variance budget is not
    /// strictly positive, i.e. when `mu_tilde >= 1/gamma`.
    pub fn new(gamma: f64, a: f64, mu_tilde: f64) -> Result<Self> {
        require(gamma > 0.0 && gamma.is_finite(), "gamma", gamma, "finite and > 0")?;
        require(a >= 0.0 && a.is_finite(), "a", a, "finite and >= 0")?;
        require(mu_tilde > 0.0 && mu_tilde.is_finite(), "mu_tilde", mu_tilde, "finite and > 0")?;
        let sigma2_tilde = mu_tilde / gamma - mu_tilde * mu_tilde;
        if sigma2_tilde <= 0.0 {
            return Err(Error::InfeasibleVariance {
                mu_tilde,
                limit: 1.0 / gamma,
            });
        }
        Ok(Self {
            gamma,
            a,
            mu_tilde,
            sigma2_tilde,
            a_tilde: a + mu_tilde,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn mu_tilde(&self) -> f64 {
        self.mu_tilde
    }
    pub fn sigma2_tilde(&self) -> f64 {
        self.sigma2_tilde
    }
    pub fn a_tilde(&self) -> f64 {
        self.a_tilde
    }

    /// Rate of the shrunken construction, `gamma_tilde = mu_tilde/sigma2_tilde`.
    pub fn gamma_tilde(&self) -> f64 {
        self.mu_tilde / self.sigma2_tilde
    }

    /// Exact hit probability of the sampled chain,
    /// `P{S* >= a} >= P{Y* >= a_tilde} = 1/(1 + gamma_tilde a_tilde)`.
    pub fn hit_probability(&self) -> f64 {
        1.0 / (1.0 + self.gamma_tilde() * self.a_tilde)
    }

    /// The underlying continuous construction: constant target `a_tilde`
    /// with drift `mu_tilde` and variation rate `sigma2_tilde`.
    pub fn spec(&self) -> Result<BigJumpSpec> {
        BigJumpSpec::new(self.mu_tilde, self.sigma2_tilde, JumpTargetFn::Constant(self.a_tilde))
    }
}

/// Hit-probability floor delivered by drift `mu_tilde`; shrinks to the tight
/// bound as `mu_tilde` shrinks to zero.
pub fn sampled_hit_floor(gamma: f64, a: f64, mu_tilde: f64) -> Result<f64> {
    DiscreteConstructionParams::new(gamma, a, mu_tilde).map(|p| p.hit_probability())
}

/// Largest `mu_tilde` on a dyadic bisection lattice over `(0, 1/(2 gamma)]`
/// whose analytic gap to the tight bound is at most `eps/2`, leaving the
/// other half of the budget to Monte Carlo noise.
pub fn choose_mu_for_eps(gamma: f64, a: f64, eps: f64) -> Result<f64> {
    require(gamma > 0.0 && gamma.is_finite(), "gamma", gamma, "finite and > 0")?;
    require(a >= 0.0 && a.is_finite(), "a", a, "finite and >= 0")?;
    require(eps > 0.0 && eps.is_finite(), "eps", eps, "finite and > 0")?;
    let bound = bound_tail(gamma, a)?;
    let cap = 0.5 / gamma;
    let gap = |mu: f64| -> Result<f64> { Ok(bound - sampled_hit_floor(gamma, a, mu)?) };
    if gap(cap)? <= 0.5 * eps {
        return Ok(cap);
    }
    let mut lo = 0.0f64; // feasible side: the gap vanishes as mu_tilde -> 0
    let mut hi = cap;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid)? <= 0.5 * eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 {
        // eps so small that no lattice point above zero qualified
        return Err(Error::Inversion("bisection lattice exhausted before a feasible mu_tilde"));
    }
    Ok(lo)
}

/// One sampled chain `S_k = Y_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRealization {
    /// `S_0 ..= S_K`, where `K = ceil(T)` on hit paths and a fixed descent
    /// window otherwise. Hit paths whose `ceil(T)` exceeds the emission cap
    /// carry only the capped descent prefix; `hit` and `jump_step` stay
    /// exact.
    pub values: Vec<f64>,
    /// Whether the chain reaches the level: exactly the event `T < inf`.
    pub hit: bool,
    /// `ceil(T)` when the jump happens.
    pub jump_step: Option<u64>,
}

/// Sampler for the discrete chain built over the continuous construction.
#[derive(Debug, Clone)]
pub struct ChainSampler {
    params: DiscreteConstructionParams,
    sampler: PathSampler,
}

impl ChainSampler {
    pub fn new(params: DiscreteConstructionParams) -> Result<Self> {
        Ok(Self {
            params,
            sampler: PathSampler::new(params.spec()?),
        })
    }

    pub fn params(&self) -> &DiscreteConstructionParams {
        &self.params
    }

    pub fn path_sampler(&self) -> &PathSampler {
        &self.sampler
    }

    /// Hit indicator without building the path: the chain hits iff the jump
    /// time is finite, because `S_{ceil(T)} >= a` by construction.
    #[inline]
    pub fn sample_hit<R: RngCore>(&self, rng: &mut R) -> bool {
        let e = crate::rng::exponential(rng);
        self.sampler.law().depth_for_hazard(e).is_some()
    }

    /// Full chain: descent values `-y(k)` up to the jump, then the single
    /// post-jump sample `a_tilde - mu_tilde (ceil(T) - T)`.
    pub fn sample_chain<R: RngCore>(&self, rng: &mut R) -> ChainRealization {
        let law = self.sampler.law();
        match self.sampler.sample_jump(rng) {
            None => {
                let mut values = Vec::with_capacity(NO_JUMP_STEPS as usize + 1);
                values.push(0.0);
                for k in 1..=NO_JUMP_STEPS {
                    values.push(-law.depth_at_time(k as f64));
                }
                ChainRealization {
                    values,
                    hit: false,
                    jump_step: None,
                }
            }
            Some(jump) => {
                let k_jump = crate::math::ceil(jump.time) as u64;
                let mut values = Vec::with_capacity(k_jump.min(MAX_CHAIN_STEPS) as usize + 1);
                if k_jump == 0 {
                    // T = 0 exactly (probability-zero draw): the chain starts
                    // at the post-jump level.
                    values.push(self.params.a_tilde);
                } else if k_jump > MAX_CHAIN_STEPS {
                    values.push(0.0);
                    for k in 1..=MAX_CHAIN_STEPS {
                        values.push(-law.depth_at_time(k as f64));
                    }
                } else {
                    values.push(0.0);
                    for k in 1..k_jump {
                        values.push(-law.depth_at_time(k as f64));
                    }
                    values.push(self.params.a_tilde - self.params.mu_tilde * (k_jump as f64 - jump.time));
                }
                ChainRealization {
                    values,
                    hit: true,
                    jump_step: Some(k_jump),
                }
            }
        }
    }

    /// Steps covered by every replicate regardless of outcome.
    pub fn descent_window(&self) -> u64 {
        NO_JUMP_STEPS
    }

    /// Chain truncated to the shared descent window, for conditional-drift
    /// estimation.
    ///
    /// Membership of step `k` in the truncated chain is decided by
    /// `T > k - 1` alone, which is known at step `k - 1`; the full chain
    /// instead keeps emitting steps beyond the window only when the jump
    /// eventually happens, and conditioning on that future event would bias
    /// conditional means upward at deep states.
    pub fn sample_chain_window<R: RngCore>(&self, rng: &mut R) -> ChainRealization {
        let mut chain = self.sample_chain(rng);
        chain.values.truncate(NO_JUMP_STEPS as usize + 1);
        chain
    }

    /// Monte Carlo hit frequency with Wilson interval; `analytic` carries the
    /// exact hit probability.
    pub fn estimate_hit_probability_with<J: Join>(&self, n: u64, policy: RngPolicy) -> Result<TailEstimate> {
        require(n >= 1, "n", n as f64, "at least one replicate")?;
        let kernel = |i: u64| {
            let mut rng = policy.stream(i);
            CountAccum::from_outcome(self.sample_hit(&mut rng))
        };
        let acc = map_reduce::<J, _, _>(n, &kernel).ok_or(Error::EmptyInput("no replicates"))?;
        let ci = wilson_interval(acc.hits, acc.trials, Z_95)?;
        Ok(TailEstimate {
            level_a: self.params.a,
            trials: acc.trials,
            successes: acc.hits,
            p_hat: ci.p_hat,
            ci_low: ci.ci_low,
            ci_high: ci.ci_high,
            analytic: Some(self.params.hit_probability()),
        })
    }

    /// Serial alias of [`Self::estimate_hit_probability_with`].
    pub fn estimate_hit_probability(&self, n: u64, policy: RngPolicy) -> Result<TailEstimate> {
        self.estimate_hit_probability_with::<Serial>(n, policy)
    }
}

/// Binned check of the discrete drift condition: estimates
/// `E[U_k + gamma U_k^2 | S_{k-1} in bin]`, which the condition requires to
/// be nonpositive. Bins are equal-count over the observed previous states.
/// A bin fails when its CI lower bound is strictly positive; bins with fewer
/// than 30 samples are inconclusive rather than failed.
///
/// Per-bin intervals are widened for multiplicity (two-sided 5% split across
/// the bins), so a passing construction does not fail on the sheer number of
/// bins. Chains must emit adapted windows: every step present in one
/// realization must be present in every realization surviving to it (see
/// [`ChainSampler::sample_chain_window`]).
pub fn check_discrete_condition<F>(mut sample_chain: F, gamma: f64, n: u64, bins: usize) -> Result<DriftReport>
where
    F: FnMut(u64) -> ChainRealization,
{
    require(gamma >= 0.0 && gamma.is_finite(), "gamma", gamma, "finite and >= 0")?;
    require(n >= 1, "n", n as f64, "at least one chain")?;
    require(bins >= 1, "bins", bins as f64, "at least one bin")?;
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        let chain = sample_chain(i);
        for w in chain.values.windows(2) {
            let u = w[1] - w[0];
            pairs.push((w[0], u + gamma * u * u));
        }
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput("chains produced no increments"));
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let bins = bins.min(pairs.len());
    let z_bin = crate::stats::normal_quantile(1.0 - 0.025 / bins as f64)?;
    let mut report_bins = Vec::with_capacity(bins);
    for b in 0..bins {
        let start = b * pairs.len() / bins;
        let end = (b + 1) * pairs.len() / bins;
        let slice = &pairs[start..end];
        if slice.is_empty() {
            continue;
        }
        let mut acc = MomentAccum::default();
        for &(_, stat) in slice {
            acc = crate::mc::Merge::merge(acc, MomentAccum::from_value(stat));
        }
        let est = mean_estimate(acc.n, acc.sum, acc.sum_sq, z_bin)?;
        let verdict = if slice.len() < 30 {
            Verdict::Inconclusive
        } else if est.ci_low > 0.0 {
            Verdict::Fail
        } else {
            Verdict::Pass
        };
        report_bins.push(DriftBin {
            lo: slice[0].0,
            hi: slice[slice.len() - 1].0,
            count: slice.len() as u64,
            mean: est.mean,
            se: est.se,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            verdict,
        });
    }
    Ok(DriftReport::conclude(
        "discrete drift condition: E[U + gamma U^2 | state] <= 0",
        0.0,
        report_bins,
    ))
}

/// Estimate of `E[S*]` for the +/-1 random walk with up-probability `p_up`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomWalkSupEstimate {
    pub p_up: f64,
    /// Implied rate `gamma = (1 - 2 p_up)` (drift over unit variance).
    pub gamma: f64,
    pub n: u64,
    pub mean: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Moment bound `1/(2 gamma)` that the estimate must respect.
    pub kingman_mean_bound: f64,
    /// Exact mean `r/(1-r)` with `r = p_up/(1-p_up)` (geometric maximum).
    pub analytic_mean: f64,
    /// Stop once the walk falls this far below its running maximum.
    pub drawdown: u64,
    pub steps_cap: u64,
}

/// Simulate the supremum of a +/-1 walk with negative drift.
///
/// Each replicate stops when the walk has fallen `drawdown` below its
/// running maximum (default `ceil(50/(1-2 p_up))`: the chance of ever
/// recovering that much is below `1e-6` relative, so the truncation bias is
/// negligible). `steps_cap` is a hard guard on top of the drawdown rule.
pub fn random_walk_sup_custom<J: Join>(
    p_up: f64,
    drawdown: Option<u64>,
    steps_cap: u64,
    n: u64,
    policy: RngPolicy,
) -> Result<RandomWalkSupEstimate> {
    require(
        (0.0..0.5).contains(&p_up),
        "p_up",
        p_up,
        "0 <= p_up < 1/2 (strictly negative drift)",
    )?;
    require(n >= 1, "n", n as f64, "at least one replicate")?;
    require(steps_cap >= 1, "steps_cap", steps_cap as f64, "at least one step")?;
    let gamma = 1.0 - 2.0 * p_up;
    let drawdown = match drawdown {
        Some(d) => {
            require(d >= 1, "drawdown", d as f64, "at least one step")?;
            d as i64
        }
        None => crate::math::ceil(50.0 / gamma) as i64,
    };
    let kernel = |i: u64| {
        let mut rng = policy.stream(i);
        let mut s = 0i64;
        let mut max = 0i64;
        for _ in 0..steps_cap {
            if unit_half_open(&mut rng) < p_up {
                s += 1;
                if s > max {
                    max = s;
                }
            } else {
                s -= 1;
                if max - s >= drawdown {
                    break;
                }
            }
        }
        MomentAccum::from_value(max as f64)
    };
    let acc = map_reduce::<J, _, _>(n, &kernel).ok_or(Error::EmptyInput("no replicates"))?;
    let est = mean_estimate(acc.n, acc.sum, acc.sum_sq, Z_95)?;
    let r = p_up / (1.0 - p_up);
    Ok(RandomWalkSupEstimate {
        p_up,
        gamma,
        n,
        mean: est.mean,
        se: est.se,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        kingman_mean_bound: 1.0 / (2.0 * gamma),
        analytic_mean: r / (1.0 - r),
        drawdown: drawdown as u64,
        steps_cap,
    })
}

/// [`random_walk_sup_custom`] with the default drawdown rule.
pub fn random_walk_sup_with<J: Join>(
    p_up: f64,
    steps_cap: u64,
    n: u64,
    policy: RngPolicy,
) -> Result<RandomWalkSupEstimate> {
    random_walk_sup_custom::<J>(p_up, None, steps_cap, n, policy)
}

/// Serial alias of [`random_walk_sup_with`].
pub fn random_walk_sup(p_up: f64, steps_cap: u64, n: u64, policy: RngPolicy) -> Result<RandomWalkSupEstimate> {
    random_walk_sup_with::<Serial>(p_up, steps_cap, n, policy)
}

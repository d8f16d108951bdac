//! Exact path sampling and Monte Carlo estimators.
//!
//! Sampling is exact: one standard exponential draw `E` decides everything.
//! If `E >= I(inf)` the jump never happens and the path descends forever; the
//! supremum is the starting value 0. Otherwise the jump depth is the exact
//! root of `I(c) = E` (closed form per segment), the jump time is `t(c)`, and
//! the supremum equals `h(c)` because the path never exceeds it afterwards.
//! No grid or horizon enters the supremum, so tail estimates carry no
//! truncation or discretization bias.

use alloc::vec::Vec;
use rand_chacha::rand_core::RngCore;

use crate::bounds::ClosedFormTail;
use crate::construction::{BigJumpSpec, ExtendedTime};
use crate::error::{require, Error, Result};
use crate::law::JumpLaw;
use crate::mc::{map_reduce, CountAccum, Join, MomentAccum};
use crate::rng::{exponential, RngPolicy};
use crate::stats::{mean_estimate, wilson_interval, MeanEstimate, Z_95};

/// The single upward jump of one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    /// Jump time `T`.
    pub time: f64,
    /// Descent depth `y(T)` at the jump.
    pub depth: f64,
    /// Jump size `y(T) + h(y(T))`.
    pub size: f64,
}

/// Sampling grid request: values at `0, step, 2 step, ..., <= horizon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub horizon: f64,
    pub step: f64,
}

/// One sampled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRealization {
    /// The jump, or `None` when the path descends forever.
    pub jump: Option<JumpEvent>,
    /// Exact supremum over all time: `h(y(T))` on jump paths, 0 otherwise.
    pub supremum: f64,
    /// Optional `(t, Y_t)` samples; never used for the supremum.
    pub grid: Option<Vec<(f64, f64)>>,
}

impl PathRealization {
    pub fn jump_time(&self) -> ExtendedTime {
        match &self.jump {
            Some(j) => ExtendedTime::Finite(j.time),
            None => ExtendedTime::Infinite,
        }
    }

    pub fn jump_size(&self) -> f64 {
        self.jump.map_or(0.0, |j| j.size)
    }
}

/// Monte Carlo estimate of `P{Y* >= a}` with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    /// The threshold `a`.
    pub level_a: f64,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Closed-form tail of the same spec at the same level, when available.
    pub analytic: Option<f64>,
}

/// Exact sampler for one big-jump spec.
#[derive(Debug, Clone)]
pub struct PathSampler {
    spec: BigJumpSpec,
    law: JumpLaw,
}

impl PathSampler {
    pub fn new(spec: BigJumpSpec) -> Self {
        let law = JumpLaw::new(&spec);
        Self { spec, law }
    }

    pub fn spec(&self) -> &BigJumpSpec {
        &self.spec
    }

    pub fn law(&self) -> &JumpLaw {
        &self.law
    }

    /// Draw the jump: `E ~ Exp(1)`; `E >= I(inf)` means no jump (ties go to
    /// the no-jump side; the event has probability zero), otherwise the depth
    /// solves `I(c) = E` exactly and the time is `t(c)`.
    pub fn sample_jump<R: RngCore>(&self, rng: &mut R) -> Option<JumpEvent> {
        let e = exponential(rng);
        let depth = self.law.depth_for_hazard(e)?;
        let h = self.spec.target().eval(depth);
        Some(JumpEvent {
            time: self.law.time_of_depth(depth),
            depth,
            size: depth + h,
        })
    }

    /// Supremum of one replicate; consumes exactly one draw.
    #[inline]
    pub fn sample_supremum<R: RngCore>(&self, rng: &mut R) -> f64 {
        let e = exponential(rng);
        match self.law.depth_for_hazard(e) {
            Some(depth) => self.spec.target().eval(depth),
            None => 0.0,
        }
    }

    /// Sample a full path realization, with optional gridded export.
    ///
    /// Grid values follow the path formula: `-y(t)` before the jump and
    /// `h(y(T)) - mu (t - T)` from the jump on.
    pub fn simulate_path<R: RngCore>(&self, rng: &mut R, grid: Option<GridSpec>) -> Result<PathRealization> {
        let jump = self.sample_jump(rng);
        let supremum = match &jump {
            Some(j) => self.spec.target().eval(j.depth),
            None => 0.0,
        };
        let grid = match grid {
            None => None,
            Some(g) => {
                require(g.step > 0.0 && g.step.is_finite(), "step", g.step, "finite and > 0")?;
                require(g.horizon >= 0.0 && g.horizon.is_finite(), "horizon", g.horizon, "finite and >= 0")?;
                let mut points = Vec::new();
                let mut k = 0u64;
                loop {
                    let t = k as f64 * g.step;
                    if t > g.horizon {
                        break;
                    }
                    points.push((t, self.value_at(&jump, t)));
                    k += 1;
                }
                Some(points)
            }
        };
        Ok(PathRealization {
            jump,
            supremum,
            grid,
        })
    }

    /// Path value at one time, exact (no grid interpolation).
    pub fn value_at(&self, jump: &Option<JumpEvent>, t: f64) -> f64 {
        match jump {
            Some(j) if t >= j.time => {
                let h = self.spec.target().eval(j.depth);
                h - self.spec.mu() * (t - j.time)
            }
            _ => -self.law.depth_at_time(t),
        }
    }

    /// Monte Carlo estimate of `P{Y* >= a}` over `n` replicates with exact
    /// suprema. Deterministic for a fixed policy, for any `Join` scheduler.
    pub fn estimate_tail_with<J: Join>(&self, a: f64, n: u64, policy: RngPolicy) -> Result<TailEstimate> {
        require(a >= 0.0 && a.is_finite(), "a", a, "finite and >= 0")?;
        require(n >= 1, "n", n as f64, "at least one replicate")?;
        let kernel = |i: u64| {
            let mut rng = policy.stream(i);
            CountAccum::from_outcome(self.sample_supremum(&mut rng) >= a)
        };
        let acc = map_reduce::<J, _, _>(n, &kernel).ok_or(Error::EmptyInput("no replicates"))?;
        let ci = wilson_interval(acc.hits, acc.trials, Z_95)?;
        Ok(TailEstimate {
            level_a: a,
            trials: acc.trials,
            successes: acc.hits,
            p_hat: ci.p_hat,
            ci_low: ci.ci_low,
            ci_high: ci.ci_high,
            analytic: ClosedFormTail::for_spec(&self.spec).map(|t| t.eval(a)),
        })
    }

    /// Serial alias of [`Self::estimate_tail_with`].
    pub fn estimate_tail(&self, a: f64, n: u64, policy: RngPolicy) -> Result<TailEstimate> {
        self.estimate_tail_with::<crate::mc::Serial>(a, n, policy)
    }

    /// Monte Carlo mean of `min(Y*, cap)`, the truncated supremum moment used
    /// to exhibit the logarithmic divergence of `E[Y*]`.
    pub fn estimate_truncated_mean_sup_with<J: Join>(
        &self,
        cap: f64,
        n: u64,
        policy: RngPolicy,
    ) -> Result<MeanEstimate> {
        require(cap > 0.0 && cap.is_finite(), "cap", cap, "finite and > 0")?;
        require(n >= 1, "n", n as f64, "at least one replicate")?;
        let kernel = |i: u64| {
            let mut rng = policy.stream(i);
            MomentAccum::from_value(self.sample_supremum(&mut rng).min(cap))
        };
        let acc = map_reduce::<J, _, _>(n, &kernel).ok_or(Error::EmptyInput("no replicates"))?;
        mean_estimate(acc.n, acc.sum, acc.sum_sq, Z_95)
    }

    /// Serial alias of [`Self::estimate_truncated_mean_sup_with`].
    pub fn estimate_truncated_mean_sup(&self, cap: f64, n: u64, policy: RngPolicy) -> Result<MeanEstimate> {
        self.estimate_truncated_mean_sup_with::<crate::mc::Serial>(cap, n, policy)
    }

    /// Depths of the finite jumps among `n` replicates, in replicate order.
    /// Feed to a KS test against the conditional depth law
    /// `(1 - exp(-I(c))) / (1 - exp(-I(inf)))`.
    pub fn sample_finite_depths(&self, n: u64, policy: RngPolicy) -> Vec<f64> {
        let mut depths = Vec::new();
        for i in 0..n {
            let mut rng = policy.stream(i);
            let e = exponential(&mut rng);
            if let Some(depth) = self.law.depth_for_hazard(e) {
                depths.push(depth);
            }
        }
        depths
    }
}

/// Sum of squared increments of gridded samples along `partition`, reported
/// as a nondecreasing step record `(t_k, QV up to t_k)`.
///
/// Partition points must be sorted and must coincide with grid times. As the
/// partition mesh shrinks this converges to `jump_size^2 * 1{t >= T}` for
/// big-jump paths: the descent is smooth with finite variation, so its
/// squared-increment sum vanishes linearly in the mesh.
pub fn quadratic_variation(grid: &[(f64, f64)], partition: &[f64]) -> Result<Vec<(f64, f64)>> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("grid"));
    }
    if partition.len() < 2 {
        return Err(Error::InvalidPartition("need at least two partition points"));
    }
    for w in partition.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidPartition("partition must be strictly increasing"));
        }
    }
    let mut values = Vec::with_capacity(partition.len());
    for &t in partition {
        let idx = grid
            .binary_search_by(|&(gt, _)| gt.partial_cmp(&t).expect("finite grid times"))
            .map_err(|_| Error::InvalidPartition("partition point not on the sampled grid"))?;
        values.push(grid[idx].1);
    }
    let mut record = Vec::with_capacity(partition.len());
    let mut acc = 0.0;
    record.push((partition[0], 0.0));
    for i in 1..values.len() {
        let d = values[i] - values[i - 1];
        acc += d * d;
        record.push((partition[i], acc));
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds;
    use crate::stats::{ks_critical_1pct, ks_statistic};
    use crate::target::JumpTargetFn;
    use alloc::vec;

    fn sampler(mu: f64, s2: f64, target: JumpTargetFn) -> PathSampler {
        PathSampler::new(BigJumpSpec::new(mu, s2, target).unwrap())
    }

    /// RngCore stub that replays fixed words.
    struct FixedWords(Vec<u64>, usize);
    impl RngCore for FixedWords {
        fn next_u32(&mut self) -> u32 {
            self.next_u64() as u32
        }
        fn next_u64(&mut self) -> u64 {
            let v = self.0[self.1 % self.0.len()];
            self.1 += 1;
            v
        }
        fn fill_bytes(&mut self, dst: &mut [u8]) {
            for b in dst {
                *b = self.next_u64() as u8;
            }
        }
    }

    #[test]
    fn zero_exponential_jumps_immediately() {
        // u64::MAX maps to uniform 1.0, so E = -ln(1) = 0: jump at time zero,
        // depth zero, size h(0).
        let s = sampler(1.0, 1.0, JumpTargetFn::Constant(1.0));
        let j = s.sample_jump(&mut FixedWords(vec![u64::MAX], 0)).unwrap();
        assert_eq!(j.time, 0.0);
        assert_eq!(j.depth, 0.0);
        assert_eq!(j.size, 1.0);
    }

    #[test]
    fn no_jump_probability_matches_total_hazard() {
        // exp(-I(inf)) = 1/2 for mu = s2 = 1, h == 1
        let s = sampler(1.0, 1.0, JumpTargetFn::Constant(1.0));
        let policy = RngPolicy::new(11);
        let n = 100_000u64;
        let mut never = 0u64;
        for i in 0..n {
            let mut rng = policy.stream(i);
            if s.sample_jump(&mut rng).is_none() {
                never += 1;
            }
        }
        let freq = never as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.005, "freq = {freq}");
    }

    #[test]
    fn empirical_survival_matches_closed_form() {
        let s = sampler(1.0, 1.0, JumpTargetFn::Constant(1.0));
        let policy = RngPolicy::new(5);
        let n = 100_000u64;
        let mut times = Vec::with_capacity(n as usize);
        for i in 0..n {
            let mut rng = policy.stream(i);
            times.push(s.sample_jump(&mut rng).map(|j| j.time));
        }
        for &t in &[0.5, 1.0, 2.0] {
            let depth = s.spec().depth_at_time(t).unwrap();
            let expect = (-s.spec().cumulative_hazard(depth).unwrap()).exp();
            let survived = times.iter().filter(|j| j.is_none_or(|jt| jt >= t)).count();
            let freq = survived as f64 / n as f64;
            let se = (expect * (1.0 - expect) / n as f64).sqrt();
            assert!(
                (freq - expect).abs() <= 3.0 * se,
                "t = {t}: freq {freq} vs {expect} (se {se})"
            );
        }
    }

    #[test]
    fn path_invariants() {
        let s = sampler(1.0, 1.0, JumpTargetFn::Constant(2.0));
        let policy = RngPolicy::new(3);
        let grid = GridSpec {
            horizon: 3.0,
            step: 0.25,
        };
        let mut saw_jump = false;
        let mut saw_no_jump = false;
        for i in 0..200 {
            let mut rng = policy.stream(i);
            let p = s.simulate_path(&mut rng, Some(grid)).unwrap();
            let pts = p.grid.as_ref().unwrap();
            assert_eq!(pts.len(), 13);
            match &p.jump {
                None => {
                    saw_no_jump = true;
                    assert_eq!(p.supremum, 0.0);
                    assert_eq!(p.jump_size(), 0.0);
                    for w in pts.windows(2) {
                        assert!(w[1].1 < w[0].1, "descent must be strictly decreasing");
                    }
                }
                Some(j) => {
                    saw_jump = true;
                    // constant target: supremum is exactly the target
                    assert_eq!(p.supremum, 2.0);
                    assert!((j.size - (j.depth + 2.0)).abs() < 1e-15);
                    assert!(j.size > 0.0);
                    for &(t, v) in pts {
                        if t >= j.time {
                            assert!((v - (2.0 - (t - j.time))).abs() < 1e-12);
                        } else {
                            assert!(v <= 0.0);
                        }
                    }
                }
            }
        }
        assert!(saw_jump && saw_no_jump);
    }

    #[test]
    fn affine_supremum_exceeds_offset_by_depth() {
        let s = sampler(1.0, 1.0, JumpTargetFn::Affine(16.0 / 9.0));
        let policy = RngPolicy::new(9);
        for i in 0..200 {
            let mut rng = policy.stream(i);
            if let Some(j) = s.sample_jump(&mut rng) {
                let h = 16.0 / 9.0 + j.depth;
                let mut rng2 = policy.stream(i);
                let sup = s.sample_supremum(&mut rng2);
                assert_eq!(sup, h);
                assert!(sup > 16.0 / 9.0 || j.depth == 0.0);
            }
        }
    }

    #[test]
    fn tail_estimate_at_zero_level_is_one() {
        let s = sampler(1.0, 1.0, JumpTargetFn::Constant(1.0));
        let est = s.estimate_tail(0.0, 500, RngPolicy::new(0)).unwrap();
        assert_eq!(est.p_hat, 1.0);
        assert_eq!(est.successes, 500);
    }

    #[test]
    fn tail_estimates_match_closed_forms() {
        let policy = RngPolicy::new(20260811);
        let n = 100_000;
        let s = sampler(1.0, 1.0, JumpTargetFn::Constant(1.0));
        let est = s.estimate_tail(1.0, n, policy).unwrap();
        assert!((est.p_hat - 0.5).abs() < 0.01, "p_hat = {}", est.p_hat);
        assert_eq!(est.analytic, Some(0.5));

        let s = sampler(1.0, 1.0, JumpTargetFn::Affine(16.0 / 9.0));
        let est = s.estimate_tail(1.0, n, policy).unwrap();
        assert!((est.p_hat - 0.2).abs() < 0.01, "p_hat = {}", est.p_hat);
        let analytic = est.analytic.unwrap();
        assert!((analytic - 0.2).abs() < 1e-12);
    }

    #[test]
    fn estimates_are_deterministic_and_grid_free() {
        let s = sampler(1.0, 2.0, JumpTargetFn::Affine(0.5));
        let policy = RngPolicy::new(77);
        let a = s.estimate_tail(0.7, 20_000, policy).unwrap();
        let b = s.estimate_tail(0.7, 20_000, policy).unwrap();
        assert_eq!(a, b);
        // supremum never depends on whether a grid was requested
        for i in 0..50 {
            let mut r1 = policy.stream(i);
            let mut r2 = policy.stream(i);
            let p1 = s.simulate_path(&mut r1, None).unwrap();
            let p2 = s
                .simulate_path(&mut r2, Some(GridSpec { horizon: 2.0, step: 0.1 }))
                .unwrap();
            assert_eq!(p1.supremum.to_bits(), p2.supremum.to_bits());
        }
    }

    #[test]
    fn truncated_mean_behaviour() {
        let s = sampler(1.0, 1.0, JumpTargetFn::Affine(16.0 / 9.0));
        let policy = RngPolicy::new(4);
        let tiny = s.estimate_truncated_mean_sup(1e-9, 50_000, policy).unwrap();
        assert!(tiny.mean <= 1e-9);
        let n = 100_000;
        let m10 = s.estimate_truncated_mean_sup(10.0, n, policy).unwrap();
        let m100 = s.estimate_truncated_mean_sup(100.0, n, policy).unwrap();
        let m1000 = s.estimate_truncated_mean_sup(1000.0, n, policy).unwrap();
        // divergence oracle: E[min(Y*, M)] >= ln(1+M)/5 for gamma = 1
        assert!(m10.mean >= (11f64).ln() / 5.0 - 3.0 * m10.se, "m10 = {:?}", m10);
        assert!(m100.mean >= (101f64).ln() / 5.0 - 3.0 * m100.se);
        assert!(m1000.mean >= (1001f64).ln() / 5.0 - 3.0 * m1000.se);
        // strictly increasing caps with shared replicates are strictly ordered
        assert!(m1000.mean > m100.mean && m100.mean > m10.mean);
    }

    #[test]
    fn jump_depth_law_passes_ks_at_one_percent() {
        let n = 100_000u64;
        for target in [JumpTargetFn::Constant(1.0), JumpTargetFn::Affine(16.0 / 9.0)] {
            let s = sampler(1.0, 1.0, target);
            let mut depths = s.sample_finite_depths(n, RngPolicy::new(13));
            depths.sort_by(f64::total_cmp);
            let total = s.law().total_hazard();
            let denom = 1.0 - (-total).exp();
            let law = s.law().clone();
            let cdf = move |c: f64| (1.0 - (-law.cumulative_hazard(c.max(0.0))).exp()) / denom;
            let d = ks_statistic(&depths, cdf).unwrap();
            let crit = ks_critical_1pct(depths.len());
            assert!(d < crit, "KS {d} >= {crit} on {} depths", depths.len());
        }
    }

    #[test]
    fn tail_never_exceeds_upper_bound_beyond_ci() {
        let policy = RngPolicy::new(100);
        for (mu, s2) in [(0.5, 1.0), (1.0, 1.0), (2.0, 0.5)] {
            let s = sampler(mu, s2, JumpTargetFn::Constant(1.0));
            for &a in &[0.5, 1.0, 2.0] {
                let est = s.estimate_tail(a, 20_000, policy).unwrap();
                let bound = bounds::bound_tail(mu / s2, a).unwrap();
                assert!(est.ci_low <= bound, "a = {a}: ci_low {} > bound {bound}", est.ci_low);
            }
        }
    }

    #[test]
    fn quadratic_variation_of_descent_vanishes_with_mesh() {
        let s = sampler(1.0, 1.0, JumpTargetFn::Constant(1.0));
        // replicate with no jump: supremum 0
        let policy = RngPolicy::new(11);
        let mut path = None;
        for i in 0..100 {
            let mut rng = policy.stream(i);
            let p = s
                .simulate_path(&mut rng, Some(GridSpec { horizon: 2.0, step: 1.0 / 4096.0 }))
                .unwrap();
            if p.jump.is_none() {
                path = Some(p);
                break;
            }
        }
        let path = path.expect("a no-jump replicate among 100");
        let grid = path.grid.as_ref().unwrap();
        let mut prev = f64::INFINITY;
        for &stride in &[64usize, 32, 16, 8] {
            let partition: Vec<f64> = grid.iter().step_by(stride).map(|&(t, _)| t).collect();
            let qv = quadratic_variation(grid, &partition).unwrap();
            let total = qv.last().unwrap().1;
            assert!(total < prev, "QV should shrink with the mesh");
            prev = total;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn quadratic_variation_converges_to_squared_jump() {
        let s = sampler(1.0, 1.0, JumpTargetFn::Constant(1.0));
        let policy = RngPolicy::new(2);
        // find a replicate whose jump lands inside the horizon
        let mut chosen = None;
        for i in 0..100 {
            let mut rng = policy.stream(i);
            if let Some(j) = s.sample_jump(&mut rng) {
                if j.time > 0.2 && j.time < 1.5 {
                    chosen = Some(i);
                    break;
                }
            }
        }
        let i = chosen.expect("a mid-horizon jump among 100 replicates");
        let fine = 1.0 / 8192.0;
        let mut rng = policy.stream(i);
        let p = s
            .simulate_path(&mut rng, Some(GridSpec { horizon: 2.0, step: fine }))
            .unwrap();
        let j = p.jump.unwrap();
        let grid = p.grid.as_ref().unwrap();
        let target = j.size * j.size;
        let mut errors = Vec::new();
        for &stride in &[64usize, 32, 16, 8] {
            let partition: Vec<f64> = grid.iter().step_by(stride).map(|&(t, _)| t).collect();
            let qv = quadratic_variation(grid, &partition).unwrap();
            errors.push((qv.last().unwrap().1 - target).abs());
        }
        // error halves with the mesh, within a factor-4 slack per level
        for w in errors.windows(2) {
            assert!(w[1] <= 2.0 * w[0] + 1e-12, "errors = {errors:?}");
            assert!(w[1] >= w[0] / 8.0 - 1e-12, "errors = {errors:?}");
        }
        assert!(errors[3] < errors[0], "net refinement must help: {errors:?}");
    }

    #[test]
    fn quadratic_variation_rejects_bad_partitions() {
        let grid = vec![(0.0, 0.0), (0.5, -0.2), (1.0, -0.3)];
        assert!(matches!(
            quadratic_variation(&grid, &[0.5, 0.0]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            quadratic_variation(&grid, &[0.0, 0.25]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(quadratic_variation(&grid, &[0.0]), Err(Error::InvalidPartition(_))));
        assert!(quadratic_variation(&grid, &[0.0, 0.5, 1.0]).is_ok());
    }
}

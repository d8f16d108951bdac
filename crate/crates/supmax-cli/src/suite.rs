//! The verification suite behind `supmax verify`.
//!
//! Every check re-derives its reference analytically and records one JSON
//! line with the observed value, the reference, the tolerance, and a
//! PASS/FAIL verdict. The smoke suite runs the whole checklist at desk
//! scale; the full suite raises the replicate counts and adds the
//! conditional-rate and martingale checks. All randomness flows through
//! labelled substreams of the master seed, so output is byte-identical
//! across runs and worker counts.

use std::path::Path;

use crate::fmt::round6;
use crate::parallel::RayonJoin;
use crate::records::{CheckRecord, SummaryRecord};
use crate::CliError;
use supmax_core::stats::wilson_interval;
use supmax_core::{
    affine_target_tail, bound_tail, check_continuous_drift, check_discrete_condition,
    check_value_identities, choose_mu_for_eps, constant_target_tail, equality_diagnostics,
    flat_plateau_b, quadratic_variation, random_walk_sup_with, stats,
    stopped_compensated_mean, verify_uniform_sweep, BigJumpSpec, ChainRealization, ChainSampler,
    DiscreteConstructionParams, GridSpec, JumpTargetFn, PathSampler, RngPolicy, Verdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SuiteKind {
    /// Desk-scale run of every criterion (about a minute)
    Smoke,
    /// Larger replicate counts plus the conditional-rate checks
    Full,
}

impl SuiteKind {
    fn name(&self) -> &'static str {
        match self {
            SuiteKind::Smoke => "smoke",
            SuiteKind::Full => "full",
        }
    }
}

struct Suite {
    policy: RngPolicy,
    records: Vec<CheckRecord>,
    n_tail: u64,
    n_walk: u64,
    n_chain: u64,
    inject_bug: bool,
}

impl Suite {
    fn check(&mut self, name: &'static str, case: String, observed: f64, reference: f64, tolerance: f64, pass: bool) {
        self.records.push(CheckRecord {
            schema_version: 1,
            record: "check",
            name,
            case,
            observed: round6(observed),
            reference: round6(reference),
            tolerance: round6(tolerance),
            verdict: if pass { "PASS" } else { "FAIL" },
        });
    }

    fn sub(&self, label: u64) -> RngPolicy {
        self.policy.substream(label)
    }
}

fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

pub fn run(kind: SuiteKind, seed: u64, inject_bug: bool, out: Option<&Path>) -> Result<bool, CliError> {
    let (n_tail, n_walk, n_chain) = match kind {
        SuiteKind::Smoke => (100_000, 100_000, 10_000),
        SuiteKind::Full => (1_000_000, 200_000, 30_000),
    };
    let mut suite = Suite {
        policy: RngPolicy::new(seed),
        records: Vec::new(),
        n_tail,
        n_walk,
        n_chain,
        inject_bug,
    };

    constant_target_tightness(&mut suite)?;
    uniform_lower_sweep(&mut suite)?;
    upper_bound_compliance(&mut suite)?;
    jump_depth_law_ks(&mut suite)?;
    discrete_construction(&mut suite)?;
    walk_moment_bound(&mut suite)?;
    truncated_mean_divergence(&mut suite)?;
    numerical_identities(&mut suite)?;
    if kind == SuiteKind::Full {
        conditional_rates(&mut suite)?;
        discrete_condition_checks(&mut suite)?;
        martingale_and_equality(&mut suite)?;
    }

    let failed = suite.records.iter().filter(|r| r.verdict == "FAIL").count() as u64;
    let passed = suite.records.len() as u64 - failed;
    let summary = SummaryRecord {
        schema_version: 1,
        record: "summary",
        suite: kind.name().to_string(),
        seed,
        checks: suite.records.len() as u64,
        passed,
        failed,
        verdict: if failed == 0 { "PASS" } else { "FAIL" },
    };
    let mut w = crate::records::open_sink(out)?;
    use std::io::Write;
    for record in &suite.records {
        writeln!(w, "{}", serde_json::to_string(record)?)?;
    }
    writeln!(w, "{}", serde_json::to_string(&summary)?)?;
    w.flush()?;
    Ok(failed == 0)
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError {
            code: 4,
            message: format!("serialization error: {e}"),
        }
    }
}

/// Tightness of the constant-target construction: the estimated tail at the
/// target level must sit within 0.01 of the closed form it attains.
fn constant_target_tightness(suite: &mut Suite) -> Result<(), CliError> {
    for (idx, &(mu, sigma2, a)) in [(1.0, 1.0, 1.0), (1.0, 2.0, 3.0), (2.0, 1.0, 0.5)].iter().enumerate() {
        let spec = BigJumpSpec::new(mu, sigma2, JumpTargetFn::Constant(a))?;
        let sampler = PathSampler::new(spec);
        let policy = suite.sub(idx as u64);
        let p_hat = if suite.inject_bug {
            // negative control: score the descent depth instead of the
            // jump-target level the path actually reaches
            let mut hits = 0u64;
            for i in 0..suite.n_tail {
                let mut rng = policy.stream(i);
                let sup = sampler.sample_jump(&mut rng).map_or(0.0, |j| j.depth);
                hits += (sup >= a) as u64;
            }
            wilson_interval(hits, suite.n_tail, stats::Z_95)?.p_hat
        } else {
            sampler.estimate_tail_with::<RayonJoin>(a, suite.n_tail, policy)?.p_hat
        };
        let reference = constant_target_tail(mu, sigma2, a)?;
        suite.check(
            "constant_target_tightness",
            format!("mu={mu} sigma2={sigma2} a={a} n={}", suite.n_tail),
            p_hat,
            reference,
            0.01,
            (p_hat - reference).abs() <= 0.01,
        );
    }
    Ok(())
}

/// The flat-plateau affine construction dominates the uniform lower bound at
/// every level, sits at 1/5 on the plateau, and matches its closed form in
/// the tail.
fn uniform_lower_sweep(suite: &mut Suite) -> Result<(), CliError> {
    let (mu, sigma2) = (1.0, 1.0);
    let b = flat_plateau_b(mu, sigma2)?;
    let spec = BigJumpSpec::new(mu, sigma2, JumpTargetFn::Affine(b))?;
    let sampler = PathSampler::new(spec);
    let levels = [0.0, 1.0, b, 5.0, 10.0, 20.0, 100.0];
    let report = verify_uniform_sweep(&sampler, &levels, suite.n_tail, suite.sub(10))?;
    for row in &report.rows {
        let a = row.a;
        suite.check(
            "uniform_lower_bound",
            format!("a={a} n={}", suite.n_tail),
            row.estimate.ci_high,
            row.lower_bound,
            0.0,
            row.verdict == Verdict::Pass,
        );
        if a > 0.0 && a <= b {
            suite.check(
                "plateau_level",
                format!("a={a} n={}", suite.n_tail),
                row.estimate.p_hat,
                0.2,
                0.01,
                (row.estimate.p_hat - 0.2).abs() <= 0.01,
            );
        }
        if a == 10.0 {
            let closed = affine_target_tail(mu, sigma2, b, a)?;
            suite.check(
                "affine_tail_value",
                format!("a={a} n={}", suite.n_tail),
                row.estimate.p_hat,
                closed,
                0.005,
                (row.estimate.p_hat - closed).abs() <= 0.005,
            );
        }
    }
    Ok(())
}

/// No estimate on the parameter lattice may place its interval lower bound
/// above the tight upper bound (levels at half, at, and above each target
/// scale).
///
/// This is one simultaneous statement over 54 comparisons, 9 of which sit at
/// exact equality, so the compliance interval is Wilson at the
/// Bonferroni-adjusted level `1 - 0.05/54`: per-comparison 95% intervals
/// would false-alarm on roughly every fifth seed while the adjusted band
/// keeps joint coverage at 95%. Reported rows elsewhere keep plain 95%
/// intervals.
fn upper_bound_compliance(suite: &mut Suite) -> Result<(), CliError> {
    let rates = [(0.5, 1.0), (1.0, 1.0), (2.0, 0.5)];
    let comparisons = 54.0;
    let z_joint = stats::normal_quantile(1.0 - 0.025 / comparisons)?;
    let mut label = 100u64;
    for &(mu, sigma2) in &rates {
        for family in 0..2usize {
            for &p in &[0.5f64, 16.0 / 9.0, 4.0] {
                let (target, case_name) = if family == 0 {
                    // constant targets use round scales
                    let a0 = if (p - 16.0 / 9.0).abs() < 1e-12 { 1.0 } else { p };
                    (JumpTargetFn::Constant(a0), format!("constant a={a0}"))
                } else {
                    (JumpTargetFn::Affine(p), format!("affine b={p}"))
                };
                let spec = BigJumpSpec::new(mu, sigma2, target)?;
                let gamma = spec.gamma();
                let sampler = PathSampler::new(spec);
                let policy = suite.sub(label);
                label += 1;
                let scale = if family == 0 { sampler.spec().target().eval(0.0) } else { p };
                let mut worst = f64::NEG_INFINITY;
                for &f in &[0.5, 1.0, 2.0] {
                    let a = scale * f;
                    let est = sampler.estimate_tail_with::<RayonJoin>(a, suite.n_tail, policy)?;
                    let joint_low = wilson_interval(est.successes, est.trials, z_joint)?.ci_low;
                    worst = worst.max(joint_low - bound_tail(gamma, a)?);
                }
                suite.check(
                    "upper_bound_compliance",
                    format!("{case_name} mu={mu} sigma2={sigma2} n={}", suite.n_tail),
                    worst,
                    0.0,
                    0.0,
                    worst <= 0.0,
                );
            }
        }
    }
    Ok(())
}

/// Sampled jump depths against the conditional depth law evaluated through
/// the quadrature route (the sampler inverts the closed-form route, so the
/// two sides are independent).
fn jump_depth_law_ks(suite: &mut Suite) -> Result<(), CliError> {
    for (idx, target) in [JumpTargetFn::Constant(1.0), JumpTargetFn::Affine(16.0 / 9.0)]
        .into_iter()
        .enumerate()
    {
        let case = match &target {
            JumpTargetFn::Constant(a) => format!("constant a={a}"),
            JumpTargetFn::Affine(b) => format!("affine b={:.4}", b),
            JumpTargetFn::Tabulated(_) => unreachable!(),
        };
        let spec = BigJumpSpec::new(1.0, 1.0, target)?;
        let sampler = PathSampler::new(spec.clone());
        let n = 100_000u64;
        let mut depths = sampler.sample_finite_depths(n, suite.sub(200 + idx as u64));
        depths.sort_by(f64::total_cmp);
        let total = spec.cumulative_hazard(f64::INFINITY)?;
        let denom = 1.0 - (-total).exp();
        // CDF through the quadrature route, precomputed so errors propagate
        let mut cdf = Vec::with_capacity(depths.len());
        for &c in &depths {
            cdf.push((1.0 - (-spec.cumulative_hazard(c.max(0.0))?).exp()) / denom);
        }
        let m = depths.len() as f64;
        let mut d = 0.0f64;
        for (i, &f) in cdf.iter().enumerate() {
            d = d.max((f - (i as f64 + 1.0) / m).abs()).max((f - i as f64 / m).abs());
        }
        let critical = stats::ks_critical_1pct(depths.len());
        suite.check(
            "jump_depth_law_ks",
            format!("{case} samples={}", depths.len()),
            d,
            critical,
            0.0,
            d < critical,
        );
    }
    Ok(())
}

/// The sampled-chain demonstration: the chosen drift lands the hit
/// probability within the eps budget under the tight bound, and the fixed
/// mu_tilde = 0.25 case matches its exact hit probability.
fn discrete_construction(suite: &mut Suite) -> Result<(), CliError> {
    let (gamma, a, eps) = (1.0, 1.0, 0.05);
    let mu_tilde = choose_mu_for_eps(gamma, a, eps)?;
    let params = DiscreteConstructionParams::new(gamma, a, mu_tilde)?;
    let sampler = ChainSampler::new(params)?;
    let est = sampler.estimate_hit_probability_with::<RayonJoin>(suite.n_tail, suite.sub(300))?;
    let se = binomial_se(est.p_hat, est.trials);
    let floor = bound_tail(gamma, a)? - eps;
    suite.check(
        "discrete_hit_floor",
        format!("gamma={gamma} a={a} eps={eps} mu_tilde={mu_tilde:.6} n={}", est.trials),
        est.p_hat,
        floor + eps / 2.0,
        eps / 2.0 + 3.0 * se,
        est.p_hat >= floor - 3.0 * se,
    );
    suite.check(
        "discrete_hit_ceiling",
        format!("gamma={gamma} a={a} n={}", est.trials),
        est.p_hat,
        bound_tail(gamma, a)?,
        3.0 * se,
        est.p_hat <= bound_tail(gamma, a)? + 3.0 * se,
    );

    let params = DiscreteConstructionParams::new(1.0, 1.0, 0.25)?;
    let sampler = ChainSampler::new(params)?;
    let est = sampler.estimate_hit_probability_with::<RayonJoin>(suite.n_tail, suite.sub(301))?;
    suite.check(
        "discrete_demo_hit",
        format!("gamma=1 a=1 mu_tilde=0.25 n={}", est.trials),
        est.p_hat,
        params.hit_probability(),
        0.01,
        (est.p_hat - params.hit_probability()).abs() <= 0.01,
    );
    // cross-check: the hit indicator is exactly the finite-jump event
    let policy = suite.sub(302);
    let mut mismatches = 0u64;
    for i in 0..suite.n_chain {
        let mut r1 = policy.stream(i);
        let mut r2 = policy.stream(i);
        let chain = sampler.sample_chain(&mut r1);
        if chain.hit != sampler.sample_hit(&mut r2) {
            mismatches += 1;
        }
    }
    suite.check(
        "discrete_hit_is_finite_jump",
        format!("replicates={}", suite.n_chain),
        mismatches as f64,
        0.0,
        0.0,
        mismatches == 0,
    );
    Ok(())
}

/// The +/-1 walk with p_up = 0.45: estimate near the geometric mean 4.5 and
/// below the moment bound 5.
fn walk_moment_bound(suite: &mut Suite) -> Result<(), CliError> {
    let est = random_walk_sup_with::<RayonJoin>(0.45, 10_000_000, suite.n_walk, suite.sub(400))?;
    suite.check(
        "walk_mean_sup",
        format!("p_up=0.45 n={}", est.n),
        est.mean,
        est.analytic_mean,
        0.1,
        (est.mean - est.analytic_mean).abs() <= 0.1,
    );
    suite.check(
        "walk_moment_bound",
        format!("p_up=0.45 n={}", est.n),
        est.mean + 3.0 * est.se,
        est.kingman_mean_bound,
        0.0,
        est.mean + 3.0 * est.se <= est.kingman_mean_bound,
    );
    Ok(())
}

/// Truncated supremum means grow past every `ln(1+M)/5` marker: the mean of
/// the supremum diverges.
fn truncated_mean_divergence(suite: &mut Suite) -> Result<(), CliError> {
    let b = flat_plateau_b(1.0, 1.0)?;
    let spec = BigJumpSpec::new(1.0, 1.0, JumpTargetFn::Affine(b))?;
    let sampler = PathSampler::new(spec);
    let policy = suite.sub(500);
    let mut means = Vec::new();
    for &cap in &[10.0, 100.0, 1000.0] {
        let est = sampler.estimate_truncated_mean_sup_with::<RayonJoin>(cap, suite.n_tail, policy)?;
        let marker = (1.0 + cap).ln() / 5.0;
        suite.check(
            "truncated_mean_divergence",
            format!("cap={cap} n={}", suite.n_tail),
            est.mean,
            marker,
            3.0 * est.se,
            est.mean >= marker - 3.0 * est.se,
        );
        means.push(est.mean);
    }
    suite.check(
        "truncated_mean_strictly_increasing",
        format!("caps=10,100,1000 n={}", suite.n_tail),
        (means[1] - means[0]).min(means[2] - means[1]),
        0.0,
        0.0,
        means[1] > means[0] && means[2] > means[1],
    );
    Ok(())
}

/// Deterministic numeric identities: value-function derivatives, the
/// constant-family time antiderivative, the affine hazard antiderivative,
/// and quadratic-variation mesh refinement on one jump path.
fn numerical_identities(suite: &mut Suite) -> Result<(), CliError> {
    // value-function derivative identities, normalized to their tolerances
    let mut worst = 0.0f64;
    for &gamma in &[0.0, 0.5, 1.0, 4.0] {
        let report = check_value_identities(gamma, &[0.0, 0.1, 1.0, 10.0, 100.0])?;
        for row in &report.rows {
            let tol1 = (1e-4 * row.d1_analytic.abs()).max(1e-6);
            let tol2 = (1e-4 * row.d2_analytic.abs()).max(1e-6);
            worst = worst.max((row.d1_numeric - row.d1_analytic).abs() / tol1);
            worst = worst.max((row.d2_numeric - row.d2_analytic).abs() / tol2);
        }
    }
    suite.check(
        "value_identities",
        "gamma in {0,0.5,1,4}, x in {0,0.1,1,10,100}".to_string(),
        worst,
        1.0,
        0.0,
        worst <= 1.0,
    );

    // time map vs the closed antiderivative of the constant family
    let mut worst = 0.0f64;
    for &(mu, s2, a) in &[(1.0, 1.0, 1.0), (2.0, 1.0, 0.5), (0.5, 2.0, 3.0)] {
        let spec = BigJumpSpec::new(mu, s2, JumpTargetFn::Constant(a))?;
        for &c in &[0.5, 1.0, 5.0] {
            let closed = c / mu - (s2 / (mu * mu)) * ((mu * (c + a) + s2) / (mu * a + s2)).ln();
            let got = spec.time_of_depth(c)?;
            worst = worst.max((got - closed).abs() / closed.abs().max(1.0));
        }
    }
    suite.check(
        "time_map_antiderivative",
        "constant family, 9 cases".to_string(),
        worst,
        0.0,
        1e-8,
        worst <= 1e-8,
    );

    // cumulative hazard vs the affine closed form
    let mut worst = 0.0f64;
    for &(mu, s2, b) in &[(1.0, 1.0, 16.0 / 9.0), (2.0, 0.5, 1.0), (0.5, 2.0, 3.0)] {
        let spec = BigJumpSpec::new(mu, s2, JumpTargetFn::Affine(b))?;
        for &c in &[0.3, 1.0, 4.0] {
            let closed =
                0.5 * (((b + 2.0 * c) / (mu * (b + 2.0 * c) + s2)).ln() - (b / (mu * b + s2)).ln());
            worst = worst.max((spec.cumulative_hazard(c)? - closed).abs());
        }
    }
    suite.check(
        "hazard_antiderivative",
        "affine family, 9 cases".to_string(),
        worst,
        0.0,
        1e-10,
        worst <= 1e-10,
    );

    // quadratic variation converges to the squared jump under refinement
    let spec = BigJumpSpec::new(1.0, 1.0, JumpTargetFn::Constant(1.0))?;
    let sampler = PathSampler::new(spec);
    let policy = suite.sub(600);
    let mut chosen = None;
    for i in 0..200 {
        let mut rng = policy.stream(i);
        if let Some(j) = sampler.sample_jump(&mut rng) {
            if j.time > 0.2 && j.time < 1.5 {
                chosen = Some(i);
                break;
            }
        }
    }
    let i = chosen.expect("a mid-horizon jump among 200 replicates");
    let mut rng = policy.stream(i);
    let path = sampler.simulate_path(&mut rng, Some(GridSpec { horizon: 2.0, step: 1.0 / 8192.0 }))?;
    let jump = path.jump.expect("chosen replicate jumps");
    let grid = path.grid.as_ref().expect("grid requested");
    let target = jump.size * jump.size;
    let mut errors = Vec::new();
    for &stride in &[64usize, 32, 16, 8] {
        let partition: Vec<f64> = grid.iter().step_by(stride).map(|&(t, _)| t).collect();
        let qv = quadratic_variation(grid, &partition)?;
        errors.push((qv.last().expect("nonempty").1 - target).abs());
    }
    let mut ratio_max = 0.0f64;
    let mut ratio_min = f64::INFINITY;
    for w in errors.windows(2) {
        ratio_max = ratio_max.max(w[1] / w[0]);
        ratio_min = ratio_min.min(w[1] / w[0]);
    }
    suite.check(
        "qv_refinement_ratio",
        format!("4 levels, errors={errors:?}"),
        ratio_max,
        0.5,
        2.0,
        ratio_max <= 2.0 && ratio_min >= 0.125,
    );
    suite.check(
        "qv_net_decrease",
        "finest vs coarsest".to_string(),
        errors[3] / errors[0],
        0.125,
        1.0,
        errors[3] < errors[0],
    );
    Ok(())
}

/// Full suite only: conditional increment rates of the construction.
fn conditional_rates(suite: &mut Suite) -> Result<(), CliError> {
    let spec = BigJumpSpec::new(1.0, 1.0, JumpTargetFn::Constant(1.0))?;
    let sampler = PathSampler::new(spec);
    let report = check_continuous_drift(&sampler, &[0.0, 0.5], 1e-3, 200_000, suite.sub(700))?;
    for (label, rep) in [("mean", &report.mean), ("second_moment", &report.second_moment)] {
        for bin in &rep.bins {
            suite.check(
                "conditional_rate",
                format!("{label} t={} eta=0.001 n={}", bin.lo, bin.count),
                bin.mean,
                rep.target,
                3.0 * bin.se,
                bin.verdict == Verdict::Pass,
            );
        }
    }
    Ok(())
}

/// Full suite only: the discrete drift-condition checker passes the sampled
/// chain and flags a drifting-up chain.
fn discrete_condition_checks(suite: &mut Suite) -> Result<(), CliError> {
    let params = DiscreteConstructionParams::new(1.0, 1.0, 0.25)?;
    let sampler = ChainSampler::new(params)?;
    let policy = suite.sub(800);
    let report = check_discrete_condition(
        |i| {
            let mut rng = policy.stream(i);
            sampler.sample_chain_window(&mut rng)
        },
        params.gamma(),
        suite.n_chain,
        16,
    )?;
    suite.check(
        "discrete_condition_sampled_chain",
        format!("chains={} bins=16", suite.n_chain),
        if report.overall == Verdict::Pass { 0.0 } else { 1.0 },
        0.0,
        0.0,
        report.overall == Verdict::Pass,
    );

    let bad = |_: u64| ChainRealization {
        values: (0..40).map(|k| k as f64).collect(),
        hit: true,
        jump_step: None,
    };
    let report = check_discrete_condition(bad, 1.0, 100, 4)?;
    suite.check(
        "discrete_condition_flags_violation",
        "upward-drift chain".to_string(),
        if report.overall == Verdict::Fail { 0.0 } else { 1.0 },
        0.0,
        0.0,
        report.overall == Verdict::Fail,
    );
    Ok(())
}

/// Full suite only: stopped compensated-process mean stays flat, and the
/// structural equality diagnostics are exact.
fn martingale_and_equality(suite: &mut Suite) -> Result<(), CliError> {
    for (idx, target) in [JumpTargetFn::Constant(1.0), JumpTargetFn::Affine(16.0 / 9.0)]
        .into_iter()
        .enumerate()
    {
        let case = match &target {
            JumpTargetFn::Constant(a) => format!("constant a={a}"),
            JumpTargetFn::Affine(_) => "affine b=16/9".to_string(),
            JumpTargetFn::Tabulated(_) => unreachable!(),
        };
        let spec = BigJumpSpec::new(1.0, 1.0, target)?;
        let sampler = PathSampler::new(spec);
        let grid: Vec<f64> = (0..10).map(|i| 0.4 * i as f64).collect();
        let report = stopped_compensated_mean(&sampler, &grid, 50_000, suite.sub(900 + idx as u64))?;
        let worst = report
            .bins
            .iter()
            .map(|b| b.mean.abs() - 3.0 * b.se)
            .fold(f64::NEG_INFINITY, f64::max);
        suite.check(
            "stopped_martingale_mean",
            format!("{case}, 10 grid times"),
            worst,
            0.0,
            0.0,
            report.overall == Verdict::Pass,
        );

        let diag = equality_diagnostics(&sampler, 5_000, suite.sub(910 + idx as u64), 1e-3, 4.0)?;
        suite.check(
            "equality_diagnostics",
            format!("{case}: overshoot, spurious jumps, continuous qv"),
            diag.overshoot_max.max(diag.pre_jump_jump_count as f64).max(diag.continuous_qv_estimate),
            0.0,
            1e-2,
            diag.overshoot_max == 0.0 && diag.pre_jump_jump_count == 0 && diag.continuous_qv_estimate < 1e-2,
        );
    }
    Ok(())
}

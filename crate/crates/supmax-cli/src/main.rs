//! `supmax`: constructs drift-constrained extremal processes, simulates them
//! exactly, and verifies the supremum-tail bounds they are built to meet.
//!
//! Subcommands: `bound`, `simulate`, `sweep`, `discrete`, `kingman`,
//! `verify`. Output is CSV or JSON lines on stdout (or `--out FILE`), always
//! byte-identical for identical invocations and independent of `--threads`.
//!
//! Exit codes: 0 success/PASS, 1 verification FAIL, 2 usage error,
//! 3 infeasible parameters, 4 numerical failure.

mod config;
mod fmt;
mod parallel;
mod records;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use parallel::{with_threads, RayonJoin};
use records::{emit, BoundRow, DiscreteRow, Format, TailRow, WalkRow};
use supmax_core::{
    bound_tail, choose_mu_for_eps, flat_plateau_b, kingman_bounds, random_walk_sup_custom,
    uniform_lower_bound, BigJumpSpec, ChainSampler, DiscreteConstructionParams,
    Error as CoreError, JumpTargetFn, PathSampler, RngPolicy, TailEstimate,
};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "supmax",
    version,
    about = "Exact simulation and statistical verification of extremal drift-constrained processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the analytic tail bounds for one (gamma, a)
    Bound(BoundArgs),
    /// Monte Carlo estimate of P{Y* >= a} for one construction
    Simulate(SimulateArgs),
    /// Tail estimates across a grid of levels
    Sweep(SweepArgs),
    /// Discrete-time sampled-chain demonstration
    Discrete(DiscreteArgs),
    /// Random-walk supremum against the moment bound
    Kingman(KingmanArgs),
    /// Run the verification suite (JSON records, exit 0 iff all PASS)
    Verify(VerifyArgs),
}

#[derive(Args)]
struct OutputOpts {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write output to FILE instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Flat key=value defaults; explicit flags win
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunOpts {
    /// Master seed for all replicate streams
    #[arg(long, env = "SUPMAX_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads (results do not depend on this)
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Args)]
struct FamilyOpts {
    /// Constant jump target h(y) = A
    #[arg(long = "const-a", value_name = "A", allow_negative_numbers = true)]
    const_a: Option<f64>,
    /// Affine jump target h(y) = B + y; "auto" picks the flat-plateau value
    #[arg(long = "affine-b", value_name = "B|auto")]
    affine_b: Option<String>,
    /// Tabulated jump target: file of "y h" knot lines
    #[arg(long, value_name = "FILE")]
    table: Option<PathBuf>,
    /// Downward drift rate
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    mu: f64,
    /// Variation rate
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    sigma2: f64,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, allow_negative_numbers = true)]
    gamma: f64,
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    /// Add the uniform lower-bound column 1/(5(1+a gamma))
    #[arg(long)]
    with_uniform: bool,
    /// Add the moment-bound columns for the stationary-increment case
    #[arg(long)]
    with_kingman: bool,
    /// Label the row as the discrete-time bound (same formula)
    #[arg(long)]
    discrete: bool,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    family: FamilyOpts,
    /// Threshold level
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    /// Number of replicates
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    #[command(flatten)]
    run: RunOpts,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    family: FamilyOpts,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    a_min: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    a_max: f64,
    #[arg(long, default_value_t = 11)]
    points: usize,
    /// Logarithmic level grid (requires a-min > 0)
    #[arg(long)]
    log: bool,
    /// Number of replicates (shared across the grid)
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    #[command(flatten)]
    run: RunOpts,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct DiscreteArgs {
    #[arg(long, allow_negative_numbers = true)]
    gamma: f64,
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    /// Allowed shortfall from the tight bound; half is budgeted to the
    /// construction, half to Monte Carlo noise
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    eps: f64,
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    #[command(flatten)]
    run: RunOpts,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct KingmanArgs {
    /// Up-step probability of the +/-1 walk (must be below 1/2)
    #[arg(long, allow_negative_numbers = true)]
    p_up: f64,
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    /// Hard cap on steps per replicate
    #[arg(long, default_value_t = 10_000_000)]
    steps_cap: u64,
    /// Stop a replicate once it falls this far below its running maximum
    /// (default: ceil(50/(1-2 p_up)), keeping truncation bias under 1e-6)
    #[arg(long)]
    drawdown: Option<u64>,
    #[command(flatten)]
    run: RunOpts,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run
    #[arg(long, value_enum, default_value_t = suite::SuiteKind::Smoke)]
    suite: suite::SuiteKind,
    #[command(flatten)]
    run: RunOpts,
    /// Write the JSON records to FILE instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Flat key=value defaults; explicit flags win
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Corrupt the jump-size formula (negative control for the suite itself)
    #[arg(long, hide = true)]
    inject_bug: bool,
}

/// Error carrying its process exit code.
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
    fn infeasible(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::Quadrature { .. } | CoreError::Inversion(_) => 4,
            _ => 3,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: 3,
            message: format!("io error: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match config::splice_config(argv) {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Cmd::Bound(args) => cmd_bound(args),
        Cmd::Simulate(args) => cmd_simulate(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Discrete(args) => cmd_discrete(args),
        Cmd::Kingman(args) => cmd_kingman(args),
        Cmd::Verify(args) => cmd_verify(args),
    }
}

fn cmd_bound(args: BoundArgs) -> Result<u8, CliError> {
    let upper = bound_tail(args.gamma, args.a)?;
    let uniform_lower = if args.with_uniform {
        Some(uniform_lower_bound(args.gamma, args.a)?)
    } else {
        None
    };
    let (kingman_mean, kingman_tail) = if args.with_kingman {
        let (m, t) = kingman_bounds(args.gamma, args.a)?;
        (Some(m), Some(t))
    } else {
        (None, None)
    };
    let row = BoundRow {
        schema_version: SCHEMA_VERSION,
        record: "bound",
        setting: if args.discrete { "discrete" } else { "continuous" },
        gamma: fmt::round6(args.gamma),
        a: fmt::round6(args.a),
        upper_bound: fmt::round6(upper),
        uniform_lower: uniform_lower.map(fmt::round6),
        kingman_mean: kingman_mean.map(fmt::round6),
        kingman_tail: kingman_tail.map(fmt::round6),
    };
    emit(&[row], args.output.format, args.output.out.as_deref())?;
    Ok(0)
}

struct Family {
    name: &'static str,
    h_param: f64,
    spec: BigJumpSpec,
}

impl FamilyOpts {
    fn build(&self) -> Result<Family, CliError> {
        let chosen =
            self.const_a.is_some() as u8 + self.affine_b.is_some() as u8 + self.table.is_some() as u8;
        if chosen != 1 {
            return Err(CliError::usage(
                "exactly one of --const-a, --affine-b, --table must be given",
            ));
        }
        if let Some(a) = self.const_a {
            let spec = BigJumpSpec::new(self.mu, self.sigma2, JumpTargetFn::Constant(a))?;
            return Ok(Family {
                name: "constant",
                h_param: a,
                spec,
            });
        }
        if let Some(raw) = &self.affine_b {
            let b = if raw == "auto" {
                flat_plateau_b(self.mu, self.sigma2)?
            } else {
                raw.parse::<f64>()
                    .map_err(|_| CliError::usage(format!("--affine-b expects a number or \"auto\", got {raw:?}")))?
            };
            let spec = BigJumpSpec::new(self.mu, self.sigma2, JumpTargetFn::Affine(b))?;
            return Ok(Family {
                name: "affine",
                h_param: b,
                spec,
            });
        }
        let path = self.table.as_ref().expect("one family flag is set");
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::infeasible(format!("cannot read table file {}: {e}", path.display())))?;
        let mut knots = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(idx) => &raw[..idx],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty());
            let y = parts.next().and_then(|s| s.parse::<f64>().ok());
            let h = parts.next().and_then(|s| s.parse::<f64>().ok());
            match (y, h, parts.next()) {
                (Some(y), Some(h), None) => knots.push((y, h)),
                _ => {
                    return Err(CliError::infeasible(format!(
                        "table line {} is not a \"y h\" pair: {raw:?}",
                        lineno + 1
                    )))
                }
            }
        }
        let h_param = knots.len() as f64;
        let spec = BigJumpSpec::new(self.mu, self.sigma2, JumpTargetFn::Tabulated(knots))?;
        Ok(Family {
            name: "tabulated",
            h_param,
            spec,
        })
    }
}

fn tail_row(family: &Family, est: &TailEstimate) -> Result<TailRow, CliError> {
    let gamma = family.spec.gamma();
    Ok(TailRow {
        schema_version: SCHEMA_VERSION,
        record: "tail_estimate",
        family: family.name.to_string(),
        mu: fmt::round6(family.spec.mu()),
        sigma2: fmt::round6(family.spec.sigma2()),
        h_param: fmt::round6(family.h_param),
        gamma: fmt::round6(gamma),
        a: fmt::round6(est.level_a),
        n: est.trials,
        successes: est.successes,
        p_hat: fmt::round6(est.p_hat),
        ci_low: fmt::round6(est.ci_low),
        ci_high: fmt::round6(est.ci_high),
        analytic: est.analytic.map(fmt::round6),
        upper_bound: fmt::round6(bound_tail(gamma, est.level_a)?),
        uniform_lower: fmt::round6(uniform_lower_bound(gamma, est.level_a)?),
    })
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8, CliError> {
    let family = args.family.build()?;
    let sampler = PathSampler::new(family.spec.clone());
    let policy = RngPolicy::new(args.run.seed);
    let est = with_threads(args.run.threads, || {
        sampler.estimate_tail_with::<RayonJoin>(args.a, args.n, policy)
    })?;
    let row = tail_row(&family, &est)?;
    emit(&[row], args.output.format, args.output.out.as_deref())?;
    Ok(0)
}

fn level_grid(a_min: f64, a_max: f64, points: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if points == 0 {
        return Err(CliError::usage("--points must be at least 1"));
    }
    if !(a_min.is_finite() && a_max.is_finite()) || a_min < 0.0 || a_max < a_min {
        return Err(CliError::usage("need 0 <= a-min <= a-max, both finite"));
    }
    if points == 1 || a_max == a_min {
        return Ok(vec![a_min]);
    }
    if log {
        if a_min <= 0.0 {
            return Err(CliError::usage("--log requires a-min > 0"));
        }
        let (l0, l1) = (a_min.ln(), a_max.ln());
        Ok((0..points)
            .map(|i| (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp())
            .collect())
    } else {
        Ok((0..points)
            .map(|i| a_min + (a_max - a_min) * i as f64 / (points - 1) as f64)
            .collect())
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<u8, CliError> {
    let family = args.family.build()?;
    let sampler = PathSampler::new(family.spec.clone());
    let policy = RngPolicy::new(args.run.seed);
    let grid = level_grid(args.a_min, args.a_max, args.points, args.log)?;
    let rows = with_threads(args.run.threads, || -> Result<Vec<TailRow>, CliError> {
        let mut rows = Vec::with_capacity(grid.len());
        for &a in &grid {
            let est = sampler.estimate_tail_with::<RayonJoin>(a, args.n, policy)?;
            rows.push(tail_row(&family, &est)?);
        }
        Ok(rows)
    })?;
    emit(&rows, args.output.format, args.output.out.as_deref())?;
    Ok(0)
}

fn cmd_discrete(args: DiscreteArgs) -> Result<u8, CliError> {
    let mu_tilde = choose_mu_for_eps(args.gamma, args.a, args.eps)?;
    let params = DiscreteConstructionParams::new(args.gamma, args.a, mu_tilde)?;
    let sampler = ChainSampler::new(params)?;
    let policy = RngPolicy::new(args.run.seed);
    let est = with_threads(args.run.threads, || {
        sampler.estimate_hit_probability_with::<RayonJoin>(args.n, policy)
    })?;
    let row = DiscreteRow {
        schema_version: SCHEMA_VERSION,
        record: "discrete_chain",
        gamma: fmt::round6(args.gamma),
        a: fmt::round6(args.a),
        eps: fmt::round6(args.eps),
        mu_tilde: fmt::round6(params.mu_tilde()),
        sigma2_tilde: fmt::round6(params.sigma2_tilde()),
        a_tilde: fmt::round6(params.a_tilde()),
        target: fmt::round6(params.hit_probability()),
        n: est.trials,
        hits: est.successes,
        p_hat: fmt::round6(est.p_hat),
        ci_low: fmt::round6(est.ci_low),
        ci_high: fmt::round6(est.ci_high),
        upper_bound: fmt::round6(bound_tail(args.gamma, args.a)?),
    };
    emit(&[row], args.output.format, args.output.out.as_deref())?;
    Ok(0)
}

fn cmd_kingman(args: KingmanArgs) -> Result<u8, CliError> {
    let policy = RngPolicy::new(args.run.seed);
    let est = with_threads(args.run.threads, || {
        random_walk_sup_custom::<RayonJoin>(args.p_up, args.drawdown, args.steps_cap, args.n, policy)
    })?;
    let row = WalkRow {
        schema_version: SCHEMA_VERSION,
        record: "random_walk_sup",
        p_up: fmt::round6(est.p_up),
        gamma: fmt::round6(est.gamma),
        n: est.n,
        mean_sup: fmt::round6(est.mean),
        se: fmt::round6(est.se),
        ci_low: fmt::round6(est.ci_low),
        ci_high: fmt::round6(est.ci_high),
        kingman_bound: fmt::round6(est.kingman_mean_bound),
        analytic_mean: fmt::round6(est.analytic_mean),
        drawdown: est.drawdown,
        steps_cap: est.steps_cap,
    };
    emit(&[row], args.output.format, args.output.out.as_deref())?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, CliError> {
    let all_pass = with_threads(args.run.threads, || {
        suite::run(args.suite, args.run.seed, args.inject_bug, args.out.as_deref())
    })?;
    Ok(if all_pass { 0 } else { 1 })
}

//! Output records: fixed-order CSV rows and JSON-lines objects, both
//! deterministic byte-for-byte for identical inputs.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::fmt::{sig6, sig6_opt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub trait Record: Serialize {
    fn csv_header() -> &'static str;
    fn csv_row(&self) -> String;
}

/// A Monte Carlo tail row; every acceptance-style comparison is checkable
/// from one row: estimate, interval, closed form, and both bounds.
#[derive(Debug, Clone, Serialize)]
pub struct TailRow {
    pub schema_version: u32,
    pub record: &'static str,
    pub family: String,
    pub mu: f64,
    pub sigma2: f64,
    pub h_param: f64,
    pub gamma: f64,
    pub a: f64,
    pub n: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub analytic: Option<f64>,
    pub upper_bound: f64,
    pub uniform_lower: f64,
}

impl Record for TailRow {
    fn csv_header() -> &'static str {
        "family,mu,sigma2,h_param,gamma,a,n,successes,p_hat,ci_low,ci_high,analytic,upper_bound,uniform_lower"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            sig6(self.mu),
            sig6(self.sigma2),
            sig6(self.h_param),
            sig6(self.gamma),
            sig6(self.a),
            self.n,
            self.successes,
            sig6(self.p_hat),
            sig6(self.ci_low),
            sig6(self.ci_high),
            sig6_opt(self.analytic),
            sig6(self.upper_bound),
            sig6(self.uniform_lower),
        )
    }
}

/// Analytic bound row.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub schema_version: u32,
    pub record: &'static str,
    pub setting: &'static str,
    pub gamma: f64,
    pub a: f64,
    pub upper_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uniform_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kingman_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kingman_tail: Option<f64>,
}

impl Record for BoundRow {
    fn csv_header() -> &'static str {
        "setting,gamma,a,upper_bound,uniform_lower,kingman_mean,kingman_tail"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.setting,
            sig6(self.gamma),
            sig6(self.a),
            sig6(self.upper_bound),
            sig6_opt(self.uniform_lower),
            sig6_opt(self.kingman_mean),
            sig6_opt(self.kingman_tail),
        )
    }
}

/// Discrete sampled-chain demonstration row.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteRow {
    pub schema_version: u32,
    pub record: &'static str,
    pub gamma: f64,
    pub a: f64,
    pub eps: f64,
    pub mu_tilde: f64,
    pub sigma2_tilde: f64,
    pub a_tilde: f64,
    /// Exact hit probability of the sampled chain (the analytic floor).
    pub target: f64,
    pub n: u64,
    pub hits: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub upper_bound: f64,
}

impl Record for DiscreteRow {
    fn csv_header() -> &'static str {
        "gamma,a,eps,mu_tilde,sigma2_tilde,a_tilde,target,n,hits,p_hat,ci_low,ci_high,upper_bound"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            sig6(self.gamma),
            sig6(self.a),
            sig6(self.eps),
            sig6(self.mu_tilde),
            sig6(self.sigma2_tilde),
            sig6(self.a_tilde),
            sig6(self.target),
            self.n,
            self.hits,
            sig6(self.p_hat),
            sig6(self.ci_low),
            sig6(self.ci_high),
            sig6(self.upper_bound),
        )
    }
}

/// Random-walk supremum row with the moment bound alongside.
#[derive(Debug, Clone, Serialize)]
pub struct WalkRow {
    pub schema_version: u32,
    pub record: &'static str,
    pub p_up: f64,
    pub gamma: f64,
    pub n: u64,
    pub mean_sup: f64,
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub kingman_bound: f64,
    pub analytic_mean: f64,
    pub drawdown: u64,
    pub steps_cap: u64,
}

impl Record for WalkRow {
    fn csv_header() -> &'static str {
        "p_up,gamma,n,mean_sup,se,ci_low,ci_high,kingman_bound,analytic_mean,drawdown,steps_cap"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            sig6(self.p_up),
            sig6(self.gamma),
            self.n,
            sig6(self.mean_sup),
            sig6(self.se),
            sig6(self.ci_low),
            sig6(self.ci_high),
            sig6(self.kingman_bound),
            sig6(self.analytic_mean),
            self.drawdown,
            self.steps_cap,
        )
    }
}

/// One verification-suite check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub schema_version: u32,
    pub record: &'static str,
    pub name: &'static str,
    pub case: String,
    pub observed: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub verdict: &'static str,
}

impl Record for CheckRecord {
    fn csv_header() -> &'static str {
        "name,case,observed,reference,tolerance,verdict"
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.name,
            self.case,
            sig6(self.observed),
            sig6(self.reference),
            sig6(self.tolerance),
            self.verdict,
        )
    }
}

/// Suite summary line.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRecord {
    pub schema_version: u32,
    pub record: &'static str,
    pub suite: String,
    pub seed: u64,
    pub checks: u64,
    pub passed: u64,
    pub failed: u64,
    pub verdict: &'static str,
}

/// Write rows as CSV (with header) or JSON lines to stdout or a file.
pub fn emit<R: Record>(rows: &[R], format: Format, out: Option<&Path>) -> io::Result<()> {
    let mut w = open_sink(out)?;
    match format {
        Format::Csv => {
            writeln!(w, "{}", R::csv_header())?;
            for row in rows {
                writeln!(w, "{}", row.csv_row())?;
            }
        }
        Format::Json => {
            for row in rows {
                writeln!(w, "{}", serde_json::to_string(row)?)?;
            }
        }
    }
    w.flush()
}

pub fn open_sink(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

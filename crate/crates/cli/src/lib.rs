//! Command-line front end: `dof`, `plan`, `simulate` and `sweep`.

pub mod config;
pub mod format;
pub mod sweep;

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use mwrc_core::bounds::dof_upper_bound;
use mwrc_core::dof_catalog::classify;
use mwrc_core::model::{canonicalize, sample_channels, CanonMode, DoFReport, NetworkConfig};
use mwrc_core::scheme::{
    build_scheme, estimate_dof_slope, random_symbols, simulate_noiseless, sum_rate, StreamRoute,
};
use mwrc_core::linalg;
use rayon::prelude::*;

use crate::format::{rational, sig6};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NO_SCHEME: u8 = 3;
pub const EXIT_PRECONDITION: u8 = 4;
pub const EXIT_OVERSIZE: u8 = 5;
/// Construction or verification failed on the sampled channels.
pub const EXIT_FAILED: u8 = 1;

pub const SIMULATE_HEADER: &str = "seed,rate_lo,rate_hi,slope,predicted_dof";

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Self::new(EXIT_PRECONDITION, message)
    }

    pub fn oversize(message: impl Into<String>) -> Self {
        Self::new(EXIT_OVERSIZE, message)
    }

    fn failed(message: impl Into<String>) -> Self {
        Self::new(EXIT_FAILED, message)
    }

    fn io(e: std::io::Error) -> Self {
        Self::new(EXIT_FAILED, format!("write failed: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "mwrc", version, about = "DoF bounds, regimes and alignment schemes for MIMO multi-way relay channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upper bound, regime and achievable DoF of a configuration.
    Dof { config: PathBuf },
    /// Build the scheme on one channel draw and optionally verify it.
    Plan {
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run a noiseless round trip and print PASS/FAIL.
        #[arg(long)]
        verify: bool,
    },
    /// Sum-rate slope over several channel draws, as CSV.
    Simulate {
        config: PathBuf,
        #[arg(long, default_value_t = 1e4)]
        snr_lo: f64,
        #[arg(long, default_value_t = 1e6)]
        snr_hi: f64,
        /// Number of channel draws, seeds 0..n.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
    },
    /// Regime map over a grid of configurations, as CSV.
    Sweep { sweep: PathBuf },
}

/// Sizes the global thread pool from `MWRC_THREADS` when set.
pub fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("MWRC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("MWRC_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

pub fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match &cli.command {
        Command::Dof { config } => dof_text(&config::load_config(config)?)?,
        Command::Plan { config, seed, verify } => plan_text(&config::load_config(config)?, *seed, *verify)?,
        Command::Simulate {
            config,
            snr_lo,
            snr_hi,
            seeds,
        } => {
            check_powers(*snr_lo, *snr_hi)?;
            simulate_csv(&config::load_config(config)?, *snr_lo, *snr_hi, *seeds)?
        }
        Command::Sweep { sweep } => {
            let spec = sweep::parse_sweep(&config::read(sweep)?)?;
            let mut s = sweep::run_sweep(&spec)?.join("\n");
            s.push('\n');
            Outcome::Ok(s)
        }
    };
    // a plan that fails verification still prints its report first
    let (text, failure) = match text {
        Outcome::Ok(t) => (t, None),
        Outcome::Failed(t, e) => (t, Some(e)),
    };
    out.write_all(text.as_bytes()).map_err(CliError::io)?;
    failure.map_or(Ok(()), Err)
}

enum Outcome {
    Ok(String),
    Failed(String, CliError),
}

impl From<String> for Outcome {
    fn from(s: String) -> Self {
        Outcome::Ok(s)
    }
}

fn check_powers(lo: f64, hi: f64) -> Result<(), CliError> {
    if !(lo > 0.0 && hi >= 100.0 * lo) {
        return Err(CliError::precondition(format!(
            "--snr-hi ({hi}) must be at least 100 x --snr-lo ({lo})"
        )));
    }
    Ok(())
}

fn report(config: &NetworkConfig) -> Result<DoFReport, CliError> {
    classify(config).map_err(|e| CliError::usage(e.to_string()))
}

/// The one-line verdict, e.g. `bound 6, achievable 6, regime P1.i.C2.cond3.1, OPTIMAL`.
pub fn summary_line(rep: &DoFReport) -> String {
    format!(
        "bound {}, achievable {}, regime {}, {}",
        rational(rep.upper_bound),
        rep.achievable.map(rational).unwrap_or_else(|| "none".into()),
        rep.regime,
        rep.optimality
    )
}

fn dof_text(config: &NetworkConfig) -> Result<Outcome, CliError> {
    let rep = report(config)?;
    let b = dof_upper_bound(config);
    let canon = canonicalize(config, CanonMode::Catalog).map_err(|e| CliError::usage(e.to_string()))?;
    let mut s = String::new();
    let _ = writeln!(s, "network: {config}");
    if canon.config != *config {
        let _ = writeln!(s, "canonical: {}", canon.config);
    }
    if canon.cluster_tie_break && config.shape() == Some((2, 2)) {
        let _ = writeln!(
            s,
            "note: clusters tie on the second user's antennas; ordered by the larger first user, then input order"
        );
    }
    let _ = writeln!(
        s,
        "upper bound terms: all users {}, weak users x2 {}, relay x2 {}; min {}",
        b.term_sum_all, b.term_weak_users, b.term_relay, b.bound
    );
    if rep.upper_bound != num_rational::Rational64::from(b.bound as i64) {
        let _ = writeln!(s, "per-cluster cut-set bound: {}", rational(rep.upper_bound));
    }
    let _ = writeln!(s, "{}", summary_line(&rep));
    let _ = writeln!(s, "regime condition: {}", rep.regime.summary());
    match &rep.strategy {
        Some(st) => {
            let _ = writeln!(s, "strategy: {st}");
        }
        None => {
            let _ = writeln!(s, "strategy: none in catalog");
        }
    }
    Ok(s.into())
}

fn no_scheme(rep: &DoFReport) -> CliError {
    CliError::new(
        EXIT_NO_SCHEME,
        format!("no constructive scheme in catalog (regime {})", rep.regime),
    )
}

fn plan_text(config: &NetworkConfig, seed: u64, verify: bool) -> Result<Outcome, CliError> {
    let rep = report(config)?;
    let Some(strategy) = rep.strategy.clone() else {
        return Err(no_scheme(&rep));
    };
    let channels = sample_channels(config, seed).map_err(|e| CliError::failed(e.to_string()))?;
    let scheme = build_scheme(config, &strategy, &channels).map_err(|e| CliError::failed(e.to_string()))?;

    let mut s = String::new();
    let _ = writeln!(s, "network: {config}");
    let _ = writeln!(s, "{}", summary_line(&rep));
    let _ = writeln!(s, "strategy: {strategy}");
    let _ = writeln!(
        s,
        "channels: seed {}, sub-seed {}",
        channels.seed, channels.attempt
    );
    let _ = writeln!(
        s,
        "relay: {} dimensions over {} antennas x {} uses, {} slots",
        scheme.relay_dims,
        scheme.relay_antennas_used,
        scheme.extension_factor,
        scheme.slots()
    );
    for (pair, q) in &scheme.targets {
        let _ = writeln!(s, "  aligned {pair}: {} directions", q.ncols());
    }
    let mac = scheme
        .streams
        .iter()
        .filter(|st| matches!(st.route, StreamRoute::Mac { .. }))
        .count();
    if mac > 0 {
        let _ = writeln!(s, "  multiple-access streams: {mac}");
    }
    let _ = writeln!(
        s,
        "rank: direction stack {}/{}, downlink stack {}/{}",
        linalg::rank(&scheme.directions, linalg::RANK_TOL),
        scheme.slots(),
        linalg::rank(&scheme.effective_downlink, linalg::RANK_TOL),
        scheme.slots()
    );
    let _ = writeln!(
        s,
        "condition: decode {:.3e}, precode {:.3e}",
        scheme.decode_condition, scheme.precode_condition
    );
    let _ = writeln!(
        s,
        "residual: alignment {:.3e}, receive filters {:.3e}",
        scheme.alignment_residual, scheme.filter_residual
    );
    let _ = writeln!(
        s,
        "streams: {} over extension {} (stream DoF {})",
        scheme.streams.len(),
        scheme.extension_factor,
        rational(scheme.stream_dof())
    );
    if verify {
        let outcome = simulate_noiseless(&scheme, &random_symbols(&scheme, seed))
            .map_err(|e| CliError::failed(e.to_string()))?;
        if outcome.passed() {
            let _ = writeln!(s, "verify: PASS (max residual {:.3e})", outcome.residual);
        } else {
            let _ = writeln!(s, "verify: FAIL (max residual {:.3e})", outcome.residual);
            for (id, err) in &outcome.failures {
                let _ = writeln!(s, "  stream {id} {}: error {err:.3e}", scheme.streams[*id].message);
            }
            let e = CliError::failed("noiseless verification failed");
            return Ok(Outcome::Failed(s, e));
        }
    }
    Ok(s.into())
}

fn simulate_csv(config: &NetworkConfig, lo: f64, hi: f64, seeds: u64) -> Result<Outcome, CliError> {
    let rep = report(config)?;
    let Some(strategy) = rep.strategy.clone() else {
        return Err(no_scheme(&rep));
    };
    let predicted = rational(strategy.stream_dof());
    let rows: Vec<String> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let built = sample_channels(config, seed)
                .and_then(|ch| build_scheme(config, &strategy, &ch).map(|s| (s, ch)));
            match built {
                Ok((scheme, ch)) => {
                    let r_lo = sum_rate(&scheme, &ch, lo);
                    let r_hi = sum_rate(&scheme, &ch, hi);
                    let slope = estimate_dof_slope(&scheme, &ch, lo, hi).unwrap_or(f64::NAN);
                    format!("{seed},{},{},{},{predicted}", sig6(r_lo), sig6(r_hi), sig6(slope))
                }
                Err(e) => {
                    eprintln!("seed {seed}: {e}");
                    format!("{seed},nan,nan,nan,{predicted}")
                }
            }
        })
        .collect();
    let mut s = String::from(SIMULATE_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    Ok(s.into())
}

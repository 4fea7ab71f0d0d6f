//! `dcae` command-line front end: config handling, subcommand dispatch and
//! CSV output.

pub mod config;
pub mod fig2;
pub mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dcae_core::experiment::dp_ratio_check;
use dcae_core::{run_sweep, run_trials, SweepAxis, TrialSummary};
use thiserror::Error;

use crate::config::{parse_config, ConfigFlags, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl From<dcae_core::Error> for CliError {
    fn from(e: dcae_core::Error) -> Self {
        use dcae_core::Error;
        match e {
            Error::Config(c) => CliError::Config(c.to_string()),
            Error::Mechanism(m) => CliError::Config(m.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dcae", version, about = "Privacy-preserving combinatorial data auction simulator")]
pub struct Cli {
    #[command(flatten)]
    pub flags: ConfigFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Independent trials: DCAE vs Random vs Best revenue per trial
    Trial,
    /// Mean revenue and satisfaction as one parameter varies
    Sweep {
        /// m, copies or epsilon
        #[arg(long)]
        axis: String,
        /// Comma-separated axis values
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Exact probability-ratio check on neighbouring bid sets
    DpCheck {
        /// Number of neighbouring pairs
        #[arg(long, default_value_t = 100)]
        pairs: usize,
    },
    /// Candidate sets of the three pricing strategies on a fixed example
    Fig2Demo,
}

fn prepare_output(cfg: &RunConfig, file_name: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(&cfg.output_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", cfg.output_dir.display())))?;
    Ok(cfg.output_dir.join(file_name))
}

fn echo_config(cfg: &RunConfig) {
    eprintln!("# resolved config");
    eprint!("{}", cfg.resolved.to_toml());
    eprintln!("# seed {} (mechanism seed {})", cfg.scenario.seed, cfg.mechanism.seed);
}

fn run_command(cli: &Cli) -> Result<(), CliError> {
    let cfg = parse_config(&cli.flags)?;
    echo_config(&cfg);
    let seed = cfg.scenario.seed;
    match &cli.command {
        Command::Trial => {
            let trials = run_trials(&cfg.scenario, &cfg.mechanism, 0, cfg.trials, cfg.execution)?;
            let path = prepare_output(&cfg, "trials.csv")?;
            output::emit(&path, |f| output::write_trials(f, &trials, seed))?;
            let s = TrialSummary::from_trials(&trials);
            println!(
                "trials={} mean_dcae={:.3} mean_random={:.3} mean_best={:.3} var_dcae={:.3} var_random={:.3}",
                s.trials,
                s.mean_dcae_revenue,
                s.mean_random_revenue,
                s.mean_best_revenue,
                s.var_dcae_revenue,
                s.var_random_revenue
            );
            eprintln!("wrote {}", path.display());
        }
        Command::Sweep { axis, values } => {
            let axis: SweepAxis = axis.parse().map_err(|e: dcae_core::ConfigError| CliError::Config(e.to_string()))?;
            let sweep = run_sweep(&cfg.scenario, &cfg.mechanism, axis, values, cfg.trials, cfg.execution)?;
            let path = prepare_output(&cfg, &format!("sweep_{}.csv", axis.name()))?;
            output::emit(&path, |f| output::write_sweep(f, &sweep, seed))?;
            eprintln!("wrote {}", path.display());
        }
        Command::DpCheck { pairs } => {
            let report = dp_ratio_check(&cfg.scenario, &cfg.mechanism, *pairs)?;
            let path = prepare_output(&cfg, "dp_check.csv")?;
            output::emit(&path, |f| output::write_dp_check(f, &report))?;
            println!(
                "epsilon={} sensitivity={} pairs={} max_ratio={:.12} bound={:.12} holds={}",
                report.epsilon,
                report.sensitivity,
                report.pair_ratios.len(),
                report.max_ratio,
                report.bound,
                report.holds(1e-9)
            );
            eprintln!("wrote {}", path.display());
            if !report.holds(1e-9) {
                return Err(CliError::Internal(format!(
                    "probability ratio {} exceeds exp(epsilon) = {}",
                    report.max_ratio, report.bound
                )));
            }
        }
        Command::Fig2Demo => {
            let rows = fig2::demo().map_err(|e| CliError::Internal(e.to_string()))?;
            let path = prepare_output(&cfg, "fig2_demo.csv")?;
            output::emit(&path, |f| output::write_fig2(f, &rows))?;
            output::write_fig2(std::io::stdout(), &rows).map_err(|e| CliError::Io(e.to_string()))?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run_command(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dcae: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

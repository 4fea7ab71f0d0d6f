//! Run configuration: the shipped defaults, an optional user file, and
//! command-line flags, layered in that order.

use std::path::{Path, PathBuf};

use clap::Args;
use dcae_core::mechanism::{MechanismConfig, Sensitivity};
use dcae_core::scenario::{CopiesSpec, IntRange, ScenarioParams};
use dcae_core::Execution;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_CONFIG: &str = include_str!("../config/default.toml");

/// Flat key/value view of a config file. Every key is optional so that
/// files and flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_range: Option<[u32; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_range: Option<[u32; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_range: Option<[u32; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub copies_range: Option<[u32; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub copies_constant: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mechanism_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallel: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($field:ident),+ $(,)?) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )+
    };
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {}", e.message().trim())
            + &e.span().map(|s| format!(" (at byte {})", s.start)).unwrap_or_default()))
    }

    pub fn defaults() -> Self {
        Self::parse(DEFAULT_CONFIG, "built-in defaults").expect("shipped defaults parse")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Values present in `other` replace ours.
    pub fn overlay(&mut self, other: &ConfigFile) {
        overlay!(
            self, other, scenario, m, n, k_range, b_range, p_range, copies_range, copies_constant,
            q_max, iterations, trials, seed, mechanism_seed, epsilon, sensitivity, parallel, output_dir,
        );
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn parse_pair(s: &str) -> Result<[u32; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [lo, hi] => Ok([
            lo.parse().map_err(|e| format!("`{lo}`: {e}"))?,
            hi.parse().map_err(|e| format!("`{hi}`: {e}"))?,
        ]),
        _ => Err(format!("expected LO,HI, got `{s}`")),
    }
}

/// Command-line mirror of every config key.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigFlags {
    /// TOML config file layered over the built-in defaults
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// non-competitive or competitive (one copy of each type)
    #[arg(long, global = true)]
    pub scenario: Option<String>,
    /// Number of dataset types
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Number of buyers
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Requested copies per type, LO,HI
    #[arg(long, global = true, value_parser = parse_pair)]
    pub k_range: Option<[u32; 2]>,
    /// Unit bid per copy, LO,HI
    #[arg(long, global = true, value_parser = parse_pair)]
    pub b_range: Option<[u32; 2]>,
    /// Settlement unit price, LO,HI
    #[arg(long, global = true, value_parser = parse_pair)]
    pub p_range: Option<[u32; 2]>,
    /// Copies per type in the non-competitive scenario, LO,HI
    #[arg(long, global = true, value_parser = parse_pair)]
    pub copies_range: Option<[u32; 2]>,
    /// Fixed copies per type (overrides copies_range)
    #[arg(long, global = true)]
    pub copies_constant: Option<u32>,
    /// Largest request a buyer may make for one type
    #[arg(long, global = true)]
    pub q_max: Option<u32>,
    /// Candidate price vectors per trial
    #[arg(long, global = true)]
    pub iterations: Option<usize>,
    /// Trials per run (per value for sweeps)
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Master seed for instance generation
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Seed for selection draws (defaults to --seed)
    #[arg(long, global = true)]
    pub mechanism_seed: Option<u64>,
    /// Privacy budget
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Fixed sensitivity (default: m * q_max * p_max)
    #[arg(long, global = true)]
    pub sensitivity: Option<f64>,
    /// Run trials on all cores (true/false)
    #[arg(long, global = true)]
    pub parallel: Option<bool>,
    /// Directory for CSV output
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
}

impl ConfigFlags {
    fn as_file(&self) -> ConfigFile {
        ConfigFile {
            scenario: self.scenario.clone(),
            m: self.m,
            n: self.n,
            k_range: self.k_range,
            b_range: self.b_range,
            p_range: self.p_range,
            copies_range: self.copies_range,
            copies_constant: self.copies_constant,
            q_max: self.q_max,
            iterations: self.iterations,
            trials: self.trials,
            seed: self.seed,
            mechanism_seed: self.mechanism_seed,
            epsilon: self.epsilon,
            sensitivity: self.sensitivity,
            parallel: self.parallel,
            output_dir: self.output_dir.clone(),
        }
    }
}

/// Fully resolved and validated settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioParams,
    pub mechanism: MechanismConfig,
    pub trials: usize,
    pub execution: Execution,
    pub output_dir: PathBuf,
    /// The merged key/value view, echoed back to the user.
    pub resolved: ConfigFile,
}

fn required<T: Clone>(v: &Option<T>, field: &str) -> Result<T, CliError> {
    v.clone()
        .ok_or_else(|| CliError::Config(format!("{field}: missing")))
}

fn range(v: &Option<[u32; 2]>, field: &str) -> Result<IntRange, CliError> {
    let [lo, hi] = required(v, field)?;
    Ok(IntRange::new(lo, hi))
}

impl RunConfig {
    pub fn from_file(file: ConfigFile) -> Result<Self, CliError> {
        let competitive = match required(&file.scenario, "scenario")?.as_str() {
            "non-competitive" => false,
            "competitive" => true,
            other => {
                return Err(CliError::Config(format!(
                    "scenario: expected `non-competitive` or `competitive`, got `{other}`"
                )))
            }
        };
        let copies = if competitive {
            CopiesSpec::CompetitiveOne
        } else if let Some(k) = file.copies_constant {
            CopiesSpec::Constant(k)
        } else {
            CopiesSpec::Uniform(range(&file.copies_range, "copies_range")?)
        };
        let seed = required(&file.seed, "seed")?;
        let scenario = ScenarioParams {
            m: required(&file.m, "m")?,
            n: required(&file.n, "n")?,
            k_range: range(&file.k_range, "k_range")?,
            b_range: range(&file.b_range, "b_range")?,
            p_range: range(&file.p_range, "p_range")?,
            copies,
            q_max: required(&file.q_max, "q_max")?,
            pi_size: required(&file.iterations, "iterations")?,
            seed,
        };
        scenario.validate().map_err(|e| {
            // scenario field names differ from config keys in two places
            CliError::Config(
                e.to_string()
                    .replacen("pi_size", "iterations", 1)
                    .replacen("copies:", "copies_range:", 1),
            )
        })?;

        let epsilon = required(&file.epsilon, "epsilon")?;
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(CliError::Config(format!("epsilon: must be positive, got {epsilon}")));
        }
        let sensitivity = match file.sensitivity {
            None => Sensitivity::Bound,
            Some(d) if d.is_finite() && d > 0.0 => Sensitivity::Fixed(d),
            Some(d) => return Err(CliError::Config(format!("sensitivity: must be positive, got {d}"))),
        };
        let mechanism = MechanismConfig {
            epsilon,
            sensitivity,
            seed: file.mechanism_seed.unwrap_or(seed),
        };

        let trials = required(&file.trials, "trials")?;
        if trials == 0 {
            return Err(CliError::Config("trials: must be positive".into()));
        }
        let execution = if required(&file.parallel, "parallel")? {
            Execution::Parallel
        } else {
            Execution::Serial
        };
        Ok(Self {
            scenario,
            mechanism,
            trials,
            execution,
            output_dir: required(&file.output_dir, "output_dir")?,
            resolved: file,
        })
    }
}

/// Defaults, then the `--config` file if given, then explicit flags.
pub fn parse_config(flags: &ConfigFlags) -> Result<RunConfig, CliError> {
    let mut merged = ConfigFile::defaults();
    if let Some(path) = &flags.config {
        merged.overlay(&ConfigFile::load(path)?);
    }
    merged.overlay(&flags.as_file());
    RunConfig::from_file(merged)
}

//! Full trials, parameter sweeps and their aggregate statistics.
//!
//! A trial draws one instance (catalog, bids, allocation order) and one set
//! of candidate price vectors, scores every vector by its round revenue, and
//! then lets three selectors pick a vector from the same score table: the
//! exponential mechanism, a uniform draw, and the arg-max.

mod dp_check;
pub mod oracle;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::auction::{run_round, Money, PriceVector, PricingStrategy, RoundOutcome};
use crate::error::{ConfigError, Error, Result};
use crate::mechanism::{
    sample_index, select_best, select_random, select_worst, MechanismConfig, PriceCandidateSet,
};
use crate::scenario::{derive_stream, gen_instance, gen_price_candidates, CopiesSpec, Instance, ScenarioParams};
use crate::stats;

pub use dp_check::{dp_ratio_check, pair_ratio, DpCheckReport};

/// What one trial produced for each selector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial_index: u64,
    pub dcae_revenue: Money,
    pub random_revenue: Money,
    pub best_revenue: Money,
    pub min_revenue: Money,
    pub dcae_satisfaction: f64,
    pub random_satisfaction: f64,
    pub best_satisfaction: f64,
    pub chosen_price_index: usize,
    pub random_price_index: usize,
    pub best_price_index: usize,
}

impl TrialResult {
    fn check_sandwich(&self) -> Result<()> {
        let ok = |r: Money| self.min_revenue <= r && r <= self.best_revenue;
        if ok(self.dcae_revenue) && ok(self.random_revenue) {
            Ok(())
        } else {
            Err(Error::Invariant(format!(
                "trial {}: revenues outside [min, best]: {:?}",
                self.trial_index, self
            )))
        }
    }
}

/// Evaluates every price vector against the instance.
pub fn score_table(
    instance: &Instance,
    price_vectors: Vec<PriceVector>,
    strategy: PricingStrategy,
) -> Result<(PriceCandidateSet, Vec<RoundOutcome>)> {
    let outcomes = price_vectors
        .iter()
        .map(|p| run_round(&instance.bids, &instance.catalog, &instance.order, p, strategy))
        .collect::<Result<Vec<_>, _>>()?;
    let scores = outcomes.iter().map(|o| o.revenue).collect();
    Ok((PriceCandidateSet::new(price_vectors, scores)?, outcomes))
}

pub fn run_trial(params: &ScenarioParams, cfg: &MechanismConfig, trial_index: u64) -> Result<TrialResult> {
    let mechanism = cfg.mechanism_for(params.m, params.q_max, params.p_range.hi)?;
    let instance = gen_instance(params, trial_index)?;
    let price_vectors = gen_price_candidates(params, trial_index)?;
    let (set, outcomes) = score_table(&instance, price_vectors, PricingStrategy::TwoTier)?;

    let distribution = mechanism.distribution(&set)?;
    let chosen = sample_index(&distribution, &mut derive_stream(cfg.seed, trial_index, "dcae"));
    let random = select_random(&set, &mut derive_stream(cfg.seed, trial_index, "random"));
    let best = select_best(&set);
    let worst = select_worst(&set);

    let result = TrialResult {
        trial_index,
        dcae_revenue: outcomes[chosen].revenue,
        random_revenue: outcomes[random].revenue,
        best_revenue: outcomes[best].revenue,
        min_revenue: outcomes[worst].revenue,
        dcae_satisfaction: outcomes[chosen].satisfaction(),
        random_satisfaction: outcomes[random].satisfaction(),
        best_satisfaction: outcomes[best].satisfaction(),
        chosen_price_index: chosen,
        random_price_index: random,
        best_price_index: best,
    };
    result.check_sandwich()?;
    Ok(result)
}

/// Whether independent trials are spread over the rayon thread pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

/// Runs trials `first..first + count`; results come back in trial order
/// whatever the execution mode.
pub fn run_trials(
    params: &ScenarioParams,
    cfg: &MechanismConfig,
    first: u64,
    count: usize,
    execution: Execution,
) -> Result<Vec<TrialResult>> {
    params.validate()?;
    cfg.validate()?;
    let indices: Vec<u64> = (first..first + count as u64).collect();
    match execution {
        Execution::Serial => indices.iter().map(|&t| run_trial(params, cfg, t)).collect(),
        Execution::Parallel => indices.par_iter().map(|&t| run_trial(params, cfg, t)).collect(),
    }
}

/// Means and variances over a batch of trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub mean_dcae_revenue: f64,
    pub mean_random_revenue: f64,
    pub mean_best_revenue: f64,
    pub mean_min_revenue: f64,
    pub var_dcae_revenue: f64,
    pub var_random_revenue: f64,
    pub mean_dcae_satisfaction: f64,
    pub mean_random_satisfaction: f64,
    pub mean_best_satisfaction: f64,
}

impl TrialSummary {
    pub fn from_trials(trials: &[TrialResult]) -> Self {
        let col = |f: fn(&TrialResult) -> f64| trials.iter().map(f).collect::<Vec<_>>();
        let dcae = col(|t| t.dcae_revenue as f64);
        let random = col(|t| t.random_revenue as f64);
        Self {
            trials: trials.len(),
            mean_dcae_revenue: stats::mean(&dcae),
            mean_random_revenue: stats::mean(&random),
            mean_best_revenue: stats::mean(&col(|t| t.best_revenue as f64)),
            mean_min_revenue: stats::mean(&col(|t| t.min_revenue as f64)),
            var_dcae_revenue: stats::sample_variance(&dcae),
            var_random_revenue: stats::sample_variance(&random),
            mean_dcae_satisfaction: stats::mean(&col(|t| t.dcae_satisfaction)),
            mean_random_satisfaction: stats::mean(&col(|t| t.random_satisfaction)),
            mean_best_satisfaction: stats::mean(&col(|t| t.best_satisfaction)),
        }
    }
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Number of dataset types.
    M,
    /// Copies per type, applied as a constant to every type.
    Copies,
    /// Privacy budget.
    Epsilon,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::M => "m",
            SweepAxis::Copies => "copies",
            SweepAxis::Epsilon => "epsilon",
        }
    }

    fn positive_integer(&self, value: f64) -> Result<u32, ConfigError> {
        if value.is_finite() && value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
            Ok(value as u32)
        } else {
            Err(ConfigError::invalid(
                self.name(),
                format!("sweep value {value} must be a positive integer"),
            ))
        }
    }

    /// Overrides this axis in copies of the base parameters.
    pub fn apply(
        &self,
        value: f64,
        params: &ScenarioParams,
        cfg: &MechanismConfig,
    ) -> Result<(ScenarioParams, MechanismConfig), ConfigError> {
        let mut params = params.clone();
        let mut cfg = *cfg;
        match self {
            SweepAxis::M => params.m = self.positive_integer(value)? as usize,
            SweepAxis::Copies => params.copies = CopiesSpec::Constant(self.positive_integer(value)?),
            SweepAxis::Epsilon => {
                if !(value.is_finite() && value > 0.0) {
                    return Err(ConfigError::invalid(
                        "epsilon",
                        format!("sweep value {value} must be positive"),
                    ));
                }
                cfg.epsilon = value;
            }
        }
        params.validate()?;
        Ok((params, cfg))
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "m" => Ok(SweepAxis::M),
            "copies" | "K" | "k" => Ok(SweepAxis::Copies),
            "epsilon" => Ok(SweepAxis::Epsilon),
            other => Err(ConfigError::invalid(
                "axis",
                format!("unknown sweep axis `{other}` (expected m, copies or epsilon)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub summary: TrialSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn axis_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn series(&self, f: impl Fn(&TrialSummary) -> f64) -> Vec<f64> {
        self.points.iter().map(|p| f(&p.summary)).collect()
    }
}

/// Runs `trials_per_value` trials for each axis value. Value number `v`
/// uses trial indices `v * trials_per_value ..`, so no two values share a trial.
pub fn run_sweep(
    base: &ScenarioParams,
    cfg: &MechanismConfig,
    axis: SweepAxis,
    values: &[f64],
    trials_per_value: usize,
    execution: Execution,
) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(ConfigError::invalid("values", "at least one sweep value is required").into());
    }
    if trials_per_value == 0 {
        return Err(ConfigError::invalid("trials", "must be positive").into());
    }
    let mut points = Vec::with_capacity(values.len());
    for (v, &value) in values.iter().enumerate() {
        let (params, cfg) = axis.apply(value, base, cfg)?;
        let first = (v * trials_per_value) as u64;
        let trials = run_trials(&params, &cfg, first, trials_per_value, execution)?;
        points.push(SweepPoint {
            value,
            summary: TrialSummary::from_trials(&trials),
        });
    }
    Ok(SweepResult { axis, points })
}

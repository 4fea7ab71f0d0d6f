//! Exact probability-ratio check of the exponential mechanism on
//! neighbouring bid sets.
//!
//! Scores are exact integers, so the only rounding is in the log-space
//! softmax itself. Ratios are evaluated as differences of log-probabilities.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::auction::{run_round, BidSet, PriceVector, PricingStrategy};
use crate::error::{ConfigError, Result};
use crate::mechanism::{ExponentialMechanism, MechanismConfig};
use crate::scenario::{derive_stream, draw_bid, gen_instance, gen_price_candidates, Instance, ScenarioParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpCheckReport {
    pub epsilon: f64,
    pub sensitivity: f64,
    /// `exp(epsilon)`.
    pub bound: f64,
    pub max_ratio: f64,
    /// Largest ratio found for each neighbour pair, in pair order.
    pub pair_ratios: Vec<f64>,
}

impl DpCheckReport {
    /// True when every ratio is within `exp(epsilon) * (1 + rel_tol)`.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.max_ratio <= self.bound * (1.0 + rel_tol)
    }
}

fn scores(
    bids: &BidSet,
    instance: &Instance,
    price_vectors: &[PriceVector],
) -> Result<Vec<f64>> {
    price_vectors
        .iter()
        .map(|p| {
            run_round(bids, &instance.catalog, &instance.order, p, PricingStrategy::TwoTier)
                .map(|o| o.revenue as f64)
                .map_err(Into::into)
        })
        .collect()
}

/// Largest probability ratio, in either direction, that the mechanism assigns
/// to any single price vector under `instance.bids` versus `neighbor`.
pub fn pair_ratio(
    instance: &Instance,
    neighbor: &BidSet,
    price_vectors: &[PriceVector],
    mechanism: &ExponentialMechanism,
) -> Result<f64> {
    let a = mechanism.log_probabilities(&scores(&instance.bids, instance, price_vectors)?)?;
    let b = mechanism.log_probabilities(&scores(neighbor, instance, price_vectors)?)?;
    let worst = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(worst.exp())
}

/// Checks `pairs` neighbouring bid sets. Pair `t` uses the instance and
/// price vectors of trial `t` and replaces one uniformly chosen buyer's bid
/// with a fresh legal bid.
pub fn dp_ratio_check(params: &ScenarioParams, cfg: &MechanismConfig, pairs: usize) -> Result<DpCheckReport> {
    if pairs == 0 {
        return Err(ConfigError::invalid("pairs", "must be positive").into());
    }
    let mechanism = cfg.mechanism_for(params.m, params.q_max, params.p_range.hi)?;
    let mut pair_ratios = Vec::with_capacity(pairs);
    for t in 0..pairs as u64 {
        let instance = gen_instance(params, t)?;
        let price_vectors = gen_price_candidates(params, t)?;
        let mut rng = derive_stream(params.seed, t, "neighbor");
        let buyer = rng.gen_range(0..params.n);
        let neighbor = instance.bids.with_bid(buyer, draw_bid(params, &mut rng))?;
        pair_ratios.push(pair_ratio(&instance, &neighbor, &price_vectors, &mechanism)?);
    }
    let max_ratio = pair_ratios.iter().copied().fold(1.0, f64::max);
    Ok(DpCheckReport {
        epsilon: mechanism.epsilon(),
        sensitivity: mechanism.sensitivity(),
        bound: mechanism.epsilon().exp(),
        max_ratio,
        pair_ratios,
    })
}

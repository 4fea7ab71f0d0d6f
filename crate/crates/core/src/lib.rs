//! Simulation engine for a combinatorial data auction whose settlement price
//! vector is chosen by the exponential mechanism, so that individual bids
//! cannot be inferred from the outcome.
//!
//! - [`auction`]: bids, catalogs, payments, candidacy, greedy allocation, revenue.
//! - [`mechanism`]: exponential-mechanism distribution and sampling, Best/Random baselines.
//! - [`scenario`]: seeded instance and price-vector generation.
//! - [`experiment`]: trials, sweeps, the brute-force oracle and the DP ratio check.

pub mod auction;
pub mod error;
pub mod experiment;
pub mod mechanism;
pub mod scenario;
pub mod stats;

pub use auction::{
    allocate, payment, revenue, run_round, select_candidates, total_bid, AllocationOrder, Bid, BidSet,
    BuyerSet, DatasetCatalog, Money, PriceVector, PricingStrategy, RoundOutcome,
};
pub use error::{ConfigError, Error, MechanismError, ModelError, Result};
pub use experiment::{
    dp_ratio_check, run_sweep, run_trial, run_trials, DpCheckReport, Execution, SweepAxis, SweepResult,
    TrialResult, TrialSummary,
};
pub use mechanism::{
    exp_mechanism_distribution, sample_index, select_best, select_random, sensitivity_bound,
    ExponentialMechanism, MechanismConfig, PriceCandidateSet, SelectionDistribution, Sensitivity,
};
pub use scenario::{gen_instance, gen_price_candidates, CopiesSpec, Instance, IntRange, ScenarioParams};

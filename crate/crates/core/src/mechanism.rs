//! Exponential-mechanism selection of a settlement price vector, plus the
//! Best and Random baseline selectors.
//!
//! Every candidate price vector is scored by the revenue it yields under a
//! fixed allocation order. The mechanism picks candidate `i` with probability
//! proportional to `exp(epsilon * score_i / (2 * sensitivity))`. Weights are
//! formed from score differences against the maximum, so the exponent is
//! never positive and nothing overflows however large the scores get.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::auction::{Money, PriceVector};
use crate::error::MechanismError;

/// Tolerance on the total mass of a [`SelectionDistribution`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Global sensitivity bound for revenue: one buyer's bid change adds or
/// removes at most one winner, whose payment is at most `m * q_max * p_max`.
pub fn sensitivity_bound(type_count: usize, q_max: u32, p_max: u32) -> Result<Money, MechanismError> {
    if type_count == 0 || q_max == 0 || p_max == 0 {
        return Err(MechanismError::NonPositiveBoundArgument);
    }
    (type_count as u64)
        .checked_mul(u64::from(q_max))
        .and_then(|v| v.checked_mul(u64::from(p_max)))
        .ok_or(MechanismError::Overflow)
}

/// How the sensitivity used by the mechanism is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Sensitivity {
    /// Derive it from the market size with [`sensitivity_bound`].
    Bound,
    /// Use this value as-is.
    Fixed(f64),
}

/// Privacy budget, sensitivity policy and the seed for selection draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanismConfig {
    pub epsilon: f64,
    pub sensitivity: Sensitivity,
    pub seed: u64,
}

impl MechanismConfig {
    pub fn new(epsilon: f64, seed: u64) -> Result<Self, MechanismError> {
        let cfg = Self {
            epsilon,
            sensitivity: Sensitivity::Bound,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_sensitivity(mut self, sensitivity: Sensitivity) -> Self {
        self.sensitivity = sensitivity;
        self
    }

    pub fn validate(&self) -> Result<(), MechanismError> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(MechanismError::InvalidEpsilon(self.epsilon));
        }
        if let Sensitivity::Fixed(d) = self.sensitivity {
            if !(d.is_finite() && d > 0.0) {
                return Err(MechanismError::InvalidSensitivity(d));
            }
        }
        Ok(())
    }

    /// Resolves the sensitivity for a market with the given dimensions.
    pub fn sensitivity_for(&self, type_count: usize, q_max: u32, p_max: u32) -> Result<f64, MechanismError> {
        match self.sensitivity {
            Sensitivity::Bound => Ok(sensitivity_bound(type_count, q_max, p_max)? as f64),
            Sensitivity::Fixed(d) => Ok(d),
        }
    }

    pub fn mechanism_for(
        &self,
        type_count: usize,
        q_max: u32,
        p_max: u32,
    ) -> Result<ExponentialMechanism, MechanismError> {
        self.validate()?;
        ExponentialMechanism::new(self.epsilon, self.sensitivity_for(type_count, q_max, p_max)?)
    }
}

/// Candidate price vectors with the revenue each one earns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceCandidateSet {
    candidates: Vec<PriceVector>,
    scores: Vec<Money>,
}

impl PriceCandidateSet {
    pub fn new(candidates: Vec<PriceVector>, scores: Vec<Money>) -> Result<Self, MechanismError> {
        if candidates.is_empty() {
            return Err(MechanismError::EmptyCandidates);
        }
        if candidates.len() != scores.len() {
            return Err(MechanismError::ScoreCountMismatch {
                candidates: candidates.len(),
                scores: scores.len(),
            });
        }
        Ok(Self { candidates, scores })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn candidates(&self) -> &[PriceVector] {
        &self.candidates
    }

    pub fn scores(&self) -> &[Money] {
        &self.scores
    }

    pub fn scores_f64(&self) -> Vec<f64> {
        self.scores.iter().map(|&s| s as f64).collect()
    }
}

/// Probability of selecting each candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionDistribution {
    probabilities: Vec<f64>,
}

impl SelectionDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self, MechanismError> {
        if probabilities.is_empty() {
            return Err(MechanismError::EmptyCandidates);
        }
        if let Some((index, &value)) = probabilities
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p >= 0.0))
        {
            return Err(MechanismError::NonFiniteScore { index, value });
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(MechanismError::NotNormalized(total));
        }
        Ok(Self { probabilities })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

/// The exponential mechanism for a fixed privacy budget and sensitivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialMechanism {
    epsilon: f64,
    sensitivity: f64,
}

impl ExponentialMechanism {
    pub fn new(epsilon: f64, sensitivity: f64) -> Result<Self, MechanismError> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(MechanismError::InvalidEpsilon(epsilon));
        }
        if !(sensitivity.is_finite() && sensitivity > 0.0) {
            return Err(MechanismError::InvalidSensitivity(sensitivity));
        }
        Ok(Self {
            epsilon,
            sensitivity,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    /// Multiplier applied to scores in the exponent, `epsilon / (2 * sensitivity)`.
    pub fn coefficient(&self) -> f64 {
        self.epsilon / (2.0 * self.sensitivity)
    }

    /// Natural log of each selection probability.
    pub fn log_probabilities(&self, scores: &[f64]) -> Result<Vec<f64>, MechanismError> {
        let max = max_finite(scores)?;
        let coef = self.coefficient();
        let shifted: Vec<f64> = scores.iter().map(|&s| coef * (s - max)).collect();
        // the maximum contributes exp(0) = 1, so the sum is >= 1
        let log_norm = shifted.iter().map(|&x| x.exp()).sum::<f64>().ln();
        Ok(shifted.into_iter().map(|x| x - log_norm).collect())
    }

    /// Selection distribution over arbitrary finite scores.
    pub fn distribution_from_scores(&self, scores: &[f64]) -> Result<SelectionDistribution, MechanismError> {
        let max = max_finite(scores)?;
        let coef = self.coefficient();
        let weights: Vec<f64> = scores.iter().map(|&s| (coef * (s - max)).exp()).collect();
        let total: f64 = weights.iter().sum();
        Ok(SelectionDistribution {
            probabilities: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn distribution(&self, set: &PriceCandidateSet) -> Result<SelectionDistribution, MechanismError> {
        self.distribution_from_scores(&set.scores_f64())
    }
}

fn max_finite(scores: &[f64]) -> Result<f64, MechanismError> {
    if scores.is_empty() {
        return Err(MechanismError::EmptyCandidates);
    }
    if let Some((index, &value)) = scores.iter().enumerate().find(|(_, s)| !s.is_finite()) {
        return Err(MechanismError::NonFiniteScore { index, value });
    }
    Ok(scores.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Distribution the exponential mechanism places over `set`.
pub fn exp_mechanism_distribution(
    set: &PriceCandidateSet,
    mechanism: &ExponentialMechanism,
) -> Result<SelectionDistribution, MechanismError> {
    mechanism.distribution(set)
}

/// Inverse-CDF draw from `dist`. Outcomes with zero probability are never returned.
pub fn sample_index<R: Rng + ?Sized>(dist: &SelectionDistribution, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (i, &p) in dist.probabilities.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        cumulative += p;
        last_positive = i;
        if u < cumulative {
            return i;
        }
    }
    // rounding left the cumulative sum slightly below u
    last_positive
}

/// Index of the highest score, lowest index on ties.
pub fn select_best(set: &PriceCandidateSet) -> usize {
    argmax_first(set.scores())
}

/// Index of the lowest score, lowest index on ties.
pub fn select_worst(set: &PriceCandidateSet) -> usize {
    let scores = set.scores();
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s < scores[best] {
            best = i;
        }
    }
    best
}

fn argmax_first(scores: &[Money]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Uniform draw over the candidate indices.
pub fn select_random<R: Rng + ?Sized>(set: &PriceCandidateSet, rng: &mut R) -> usize {
    rng.gen_range(0..set.len())
}

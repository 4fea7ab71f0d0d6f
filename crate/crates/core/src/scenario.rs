//! Seeded generation of auction instances and candidate price vectors.
//!
//! Every trial draws from streams keyed by `(seed, trial_index, label)`, so
//! trials are independent of each other and of the order they run in, and
//! the bid stream is untouched by how many price vectors are drawn.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::auction::{AllocationOrder, Bid, BidSet, DatasetCatalog, PriceVector};
use crate::error::{ConfigError, Result};

/// Closed integer interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange {
    pub lo: u32,
    pub hi: u32,
}

impl IntRange {
    pub const fn new(lo: u32, hi: u32) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.lo <= v && v <= self.hi
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(self.lo..=self.hi)
    }

    fn check(&self, field: &str) -> Result<(), ConfigError> {
        if self.lo > self.hi {
            return Err(ConfigError::invalid(
                field,
                format!("empty interval [{}, {}]", self.lo, self.hi),
            ));
        }
        Ok(())
    }
}

/// How many copies of each dataset type the sellers supply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CopiesSpec {
    /// Each type independently uniform in `[lo, hi]`.
    Uniform(IntRange),
    /// Every type has the same count.
    Constant(u32),
    /// One copy of every type.
    CompetitiveOne,
}

/// Parameters of one experimental setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub m: usize,
    pub n: usize,
    pub k_range: IntRange,
    pub b_range: IntRange,
    pub p_range: IntRange,
    pub copies: CopiesSpec,
    pub q_max: u32,
    /// Number of candidate price vectors drawn per trial.
    pub pi_size: usize,
    pub seed: u64,
}

impl ScenarioParams {
    /// Non-competitive base setup: six types, a hundred buyers, limited but
    /// mostly sufficient stock, a thousand price vectors per trial.
    pub fn non_competitive() -> Self {
        Self {
            m: 6,
            n: 100,
            k_range: IntRange::new(0, 100),
            b_range: IntRange::new(1, 20),
            p_range: IntRange::new(1, 100),
            copies: CopiesSpec::Uniform(IntRange::new(200, 800)),
            q_max: 100,
            pi_size: 1000,
            seed: 42,
        }
    }

    /// Same as [`ScenarioParams::non_competitive`] with one copy per type.
    pub fn competitive() -> Self {
        Self {
            copies: CopiesSpec::CompetitiveOne,
            ..Self::non_competitive()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.m == 0 {
            return Err(ConfigError::invalid("m", "must be positive"));
        }
        if self.n == 0 {
            return Err(ConfigError::invalid("n", "must be positive"));
        }
        if self.pi_size == 0 {
            return Err(ConfigError::invalid("pi_size", "must be positive"));
        }
        if self.q_max == 0 {
            return Err(ConfigError::invalid("q_max", "must be positive"));
        }
        self.k_range.check("k_range")?;
        self.b_range.check("b_range")?;
        self.p_range.check("p_range")?;
        if self.k_range.hi > self.q_max {
            return Err(ConfigError::invalid(
                "k_range",
                format!("upper bound {} exceeds q_max {}", self.k_range.hi, self.q_max),
            ));
        }
        if self.b_range.lo == 0 {
            return Err(ConfigError::invalid(
                "b_range",
                "lower bound must be positive (requested types carry a positive unit price)",
            ));
        }
        if self.p_range.lo == 0 {
            return Err(ConfigError::invalid("p_range", "lower bound must be positive"));
        }
        if let CopiesSpec::Uniform(r) = self.copies {
            r.check("copies")?;
        }
        Ok(())
    }
}

/// One generated market: supply, bids and the pre-drawn allocation order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub catalog: DatasetCatalog,
    pub bids: BidSet,
    pub order: AllocationOrder,
}

/// Deterministic random stream for `(seed, trial_index, label)`.
pub fn derive_stream(seed: u64, trial_index: u64, label: &str) -> ChaCha20Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(trial_index.to_le_bytes());
    hasher.update(label.as_bytes());
    ChaCha20Rng::from_seed(hasher.finalize().into())
}

/// Draws one legal bid: per type a request in `k_range` and, for a non-zero
/// request, a unit price in `b_range`.
pub fn draw_bid<R: Rng + ?Sized>(params: &ScenarioParams, rng: &mut R) -> Bid {
    let mut quantities = Vec::with_capacity(params.m);
    let mut unit_prices = Vec::with_capacity(params.m);
    for _ in 0..params.m {
        let k = params.k_range.sample(rng);
        let b = if k > 0 { params.b_range.sample(rng) } else { 0 };
        quantities.push(k);
        unit_prices.push(b);
    }
    Bid::new(quantities, unit_prices).expect("generated bids are rational by construction")
}

pub fn gen_instance(params: &ScenarioParams, trial_index: u64) -> Result<Instance> {
    params.validate()?;
    let mut rng = derive_stream(params.seed, trial_index, "instance");

    let copies = match params.copies {
        CopiesSpec::Uniform(r) => (0..params.m).map(|_| r.sample(&mut rng)).collect(),
        CopiesSpec::Constant(k) => vec![k; params.m],
        CopiesSpec::CompetitiveOne => vec![1; params.m],
    };
    let catalog = DatasetCatalog::new(copies)?;

    let bids = (0..params.n).map(|_| draw_bid(params, &mut rng)).collect();
    let bids = BidSet::new(params.m, bids)?;

    let mut order: Vec<usize> = (0..params.n).collect();
    order.shuffle(&mut rng);
    let order = AllocationOrder::new(order)?;

    Ok(Instance {
        catalog,
        bids,
        order,
    })
}

pub fn gen_price_candidates(params: &ScenarioParams, trial_index: u64) -> Result<Vec<PriceVector>> {
    params.validate()?;
    let mut rng = derive_stream(params.seed, trial_index, "prices");
    (0..params.pi_size)
        .map(|_| {
            let prices = (0..params.m).map(|_| params.p_range.sample(&mut rng)).collect();
            PriceVector::new(prices).map_err(Into::into)
        })
        .collect()
}

//! Domain model and the deterministic per-round auction primitives.
//!
//! A round takes a settlement price vector and a pre-drawn allocation order,
//! picks the candidate buyers under a pricing strategy, admits candidates
//! greedily in order while stock lasts, and totals the winners' payments.
//! All money is integral.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Currency amount. Every price and bid in the model is a whole number.
pub type Money = u64;

/// Set of buyer ids, ordered so outcomes compare and print deterministically.
pub type BuyerSet = BTreeSet<usize>;

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<(), ModelError> {
    if expected == found {
        Ok(())
    } else {
        Err(ModelError::LengthMismatch {
            what,
            expected,
            found,
        })
    }
}

/// Supply side: number of copies available for each dataset type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetCatalog {
    copies: Vec<u32>,
}

impl DatasetCatalog {
    pub fn new(copies: Vec<u32>) -> Result<Self, ModelError> {
        if copies.is_empty() {
            return Err(ModelError::EmptyCatalog);
        }
        Ok(Self { copies })
    }

    /// Catalog with a single copy of each of `type_count` types.
    pub fn competitive(type_count: usize) -> Result<Self, ModelError> {
        Self::new(vec![1; type_count])
    }

    pub fn type_count(&self) -> usize {
        self.copies.len()
    }

    pub fn copies(&self) -> &[u32] {
        &self.copies
    }
}

/// One buyer's combinatorial bid: copies requested and unit price offered per type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bid {
    quantities: Vec<u32>,
    unit_prices: Vec<u32>,
}

impl Bid {
    /// Builds a bid, enforcing equal lengths and that a type is requested
    /// exactly when it carries a non-zero unit price.
    pub fn new(quantities: Vec<u32>, unit_prices: Vec<u32>) -> Result<Self, ModelError> {
        check_len("unit_prices", quantities.len(), unit_prices.len())?;
        for (type_index, (&quantity, &unit_price)) in
            quantities.iter().zip(&unit_prices).enumerate()
        {
            if (quantity == 0) != (unit_price == 0) {
                return Err(ModelError::Rationality {
                    type_index,
                    quantity,
                    unit_price,
                });
            }
        }
        Ok(Self {
            quantities,
            unit_prices,
        })
    }

    /// A bid requesting nothing.
    pub fn empty(type_count: usize) -> Self {
        Self {
            quantities: vec![0; type_count],
            unit_prices: vec![0; type_count],
        }
    }

    pub fn type_count(&self) -> usize {
        self.quantities.len()
    }

    pub fn quantities(&self) -> &[u32] {
        &self.quantities
    }

    pub fn unit_prices(&self) -> &[u32] {
        &self.unit_prices
    }

    pub fn is_empty(&self) -> bool {
        self.quantities.iter().all(|&k| k == 0)
    }

    /// Total number of copies requested across all types.
    pub fn total_quantity(&self) -> u64 {
        self.quantities.iter().map(|&k| u64::from(k)).sum()
    }

    /// The buyer's total bid, `sum_i k_i * b_i`.
    pub fn total_bid(&self) -> Money {
        self.quantities
            .iter()
            .zip(&self.unit_prices)
            .map(|(&k, &b)| u64::from(k) * u64::from(b))
            .sum()
    }
}

/// Checked variant of [`Bid::total_bid`] that also verifies the bid matches
/// the catalog's type count.
pub fn total_bid(bid: &Bid, type_count: usize) -> Result<Money, ModelError> {
    check_len("bid", type_count, bid.type_count())?;
    Ok(bid.total_bid())
}

/// All buyers' bids, indexed by buyer id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BidSet {
    type_count: usize,
    bids: Vec<Bid>,
}

impl BidSet {
    pub fn new(type_count: usize, bids: Vec<Bid>) -> Result<Self, ModelError> {
        for bid in &bids {
            check_len("bid", type_count, bid.type_count())?;
        }
        Ok(Self { type_count, bids })
    }

    pub fn type_count(&self) -> usize {
        self.type_count
    }

    pub fn len(&self) -> usize {
        self.bids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty()
    }

    pub fn bids(&self) -> &[Bid] {
        &self.bids
    }

    pub fn get(&self, buyer: usize) -> Option<&Bid> {
        self.bids.get(buyer)
    }

    /// Copy of this set with buyer `buyer`'s bid replaced.
    pub fn with_bid(&self, buyer: usize, bid: Bid) -> Result<Self, ModelError> {
        check_len("bid", self.type_count, bid.type_count())?;
        if buyer >= self.bids.len() {
            return Err(ModelError::UnknownBuyer {
                id: buyer,
                n: self.bids.len(),
            });
        }
        let mut bids = self.bids.clone();
        bids[buyer] = bid;
        Ok(Self {
            type_count: self.type_count,
            bids,
        })
    }
}

/// Settlement unit price for each dataset type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PriceVector {
    prices: Vec<u32>,
}

impl PriceVector {
    pub fn new(prices: Vec<u32>) -> Result<Self, ModelError> {
        if prices.is_empty() {
            return Err(ModelError::EmptyCatalog);
        }
        if let Some(type_index) = prices.iter().position(|&p| p == 0) {
            return Err(ModelError::NonPositivePrice { type_index });
        }
        Ok(Self { prices })
    }

    pub fn type_count(&self) -> usize {
        self.prices.len()
    }

    pub fn prices(&self) -> &[u32] {
        &self.prices
    }
}

/// Pre-drawn permutation of all buyer ids deciding who is served first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationOrder {
    order: Vec<usize>,
}

impl AllocationOrder {
    pub fn new(order: Vec<usize>) -> Result<Self, ModelError> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &id in &order {
            if id >= n || seen[id] {
                return Err(ModelError::InvalidOrder { n });
            }
            seen[id] = true;
        }
        Ok(Self { order })
    }

    /// The order `0, 1, .., n-1`.
    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }
}

/// Rule deciding which buyers become candidates for a given price vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PricingStrategy {
    /// Candidate iff the total bid covers the payment implied by the price vector.
    TwoTier,
    /// Candidate iff the total bid reaches a fixed total price.
    TotalPrice { threshold: Money },
    /// Candidate iff the average bid per requested copy reaches a fixed unit price.
    AverageUnitPrice { threshold: Money },
}

impl PricingStrategy {
    pub fn validate(&self) -> Result<(), ModelError> {
        match *self {
            PricingStrategy::TwoTier => Ok(()),
            PricingStrategy::TotalPrice { threshold }
            | PricingStrategy::AverageUnitPrice { threshold } => {
                if threshold == 0 {
                    Err(ModelError::NonPositiveThreshold)
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PricingStrategy::TwoTier => "two-tier",
            PricingStrategy::TotalPrice { .. } => "total-price",
            PricingStrategy::AverageUnitPrice { .. } => "average-unit-price",
        }
    }
}

/// Result of evaluating one price vector on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub candidates: BuyerSet,
    pub winners: BuyerSet,
    /// Payment per buyer id; zero for everyone outside `winners`.
    pub payments: Vec<Money>,
    pub revenue: Money,
    pub buyer_count: usize,
}

impl RoundOutcome {
    /// Fraction of all buyers that won, `|W| / n`.
    pub fn satisfaction(&self) -> f64 {
        if self.buyer_count == 0 {
            0.0
        } else {
            self.winners.len() as f64 / self.buyer_count as f64
        }
    }
}

/// Payment owed by a buyer at price vector `p`: `sum_i k_i * p_i`.
pub fn payment(bid: &Bid, p: &PriceVector) -> Result<Money, ModelError> {
    check_len("price vector", bid.type_count(), p.type_count())?;
    Ok(bid
        .quantities
        .iter()
        .zip(&p.prices)
        .map(|(&k, &price)| u64::from(k) * u64::from(price))
        .sum())
}

fn is_candidate(bid: &Bid, p: &PriceVector, strategy: PricingStrategy) -> Result<bool, ModelError> {
    if bid.is_empty() {
        return Ok(false);
    }
    let total = bid.total_bid();
    let admitted = match strategy {
        PricingStrategy::TwoTier => total >= payment(bid, p)?,
        PricingStrategy::TotalPrice { threshold } => total >= threshold,
        // total / copies >= threshold, kept in integers
        PricingStrategy::AverageUnitPrice { threshold } => {
            let scaled = threshold
                .checked_mul(bid.total_quantity())
                .ok_or(ModelError::Overflow("average unit price"))?;
            total >= scaled
        }
    };
    Ok(admitted)
}

/// Buyers eligible to win under `strategy` at price vector `p`.
pub fn select_candidates(
    bids: &BidSet,
    p: &PriceVector,
    strategy: PricingStrategy,
) -> Result<BuyerSet, ModelError> {
    strategy.validate()?;
    check_len("price vector", bids.type_count(), p.type_count())?;
    let mut out = BuyerSet::new();
    for (id, bid) in bids.bids().iter().enumerate() {
        if is_candidate(bid, p, strategy)? {
            out.insert(id);
        }
    }
    Ok(out)
}

/// Greedy all-or-nothing allocation along `order`, restricted to `candidates`.
///
/// A candidate wins when every requested quantity fits in the remaining
/// stock; blocked candidates are skipped and the pass continues. The pass
/// stops once stock is exhausted.
pub fn allocate(
    candidates: &BuyerSet,
    bids: &BidSet,
    catalog: &DatasetCatalog,
    order: &AllocationOrder,
) -> Result<BuyerSet, ModelError> {
    check_len("catalog", bids.type_count(), catalog.type_count())?;
    check_len("allocation order", bids.len(), order.len())?;
    if let Some(&id) = candidates.iter().find(|&&id| id >= bids.len()) {
        return Err(ModelError::UnknownBuyer { id, n: bids.len() });
    }

    let mut remaining: Vec<u32> = catalog.copies().to_vec();
    let mut winners = BuyerSet::new();
    for &buyer in order.as_slice() {
        if remaining.iter().all(|&r| r == 0) {
            break;
        }
        if !candidates.contains(&buyer) {
            continue;
        }
        let request = bids.bids()[buyer].quantities();
        if request.iter().zip(&remaining).all(|(&k, &r)| k <= r) {
            for (r, &k) in remaining.iter_mut().zip(request) {
                *r -= k;
            }
            winners.insert(buyer);
        }
    }
    Ok(winners)
}

/// Total payments collected from `winners` at price vector `p`.
pub fn revenue(winners: &BuyerSet, bids: &BidSet, p: &PriceVector) -> Result<Money, ModelError> {
    let mut total: Money = 0;
    for &id in winners {
        let bid = bids.get(id).ok_or(ModelError::UnknownBuyer { id, n: bids.len() })?;
        total = total
            .checked_add(payment(bid, p)?)
            .ok_or(ModelError::Overflow("revenue"))?;
    }
    Ok(total)
}

/// Evaluates one full round: candidacy, allocation, payments and revenue.
pub fn run_round(
    bids: &BidSet,
    catalog: &DatasetCatalog,
    order: &AllocationOrder,
    p: &PriceVector,
    strategy: PricingStrategy,
) -> Result<RoundOutcome, ModelError> {
    let candidates = select_candidates(bids, p, strategy)?;
    let winners = allocate(&candidates, bids, catalog, order)?;
    let mut payments = vec![0; bids.len()];
    for &id in &winners {
        payments[id] = payment(&bids.bids()[id], p)?;
    }
    let revenue = revenue(&winners, bids, p)?;
    Ok(RoundOutcome {
        candidates,
        winners,
        payments,
        revenue,
        buyer_count: bids.len(),
    })
}

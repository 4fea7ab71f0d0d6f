//! Fixed four-buyer market contrasting the three pricing strategies.
//!
//! Buyer 0 wants many copies at a low unit bid, buyer 1 a single copy at a
//! high unit bid, buyers 2 and 3 sit in between. Total-price pricing favours
//! buyer 0, average-unit-price pricing favours buyer 1, and only two-tier
//! pricing never charges a winner more than it bid.

use dcae_core::auction::{
    payment, run_round, AllocationOrder, Bid, BidSet, DatasetCatalog, Money, PriceVector, PricingStrategy,
};

const COPIES: [u32; 3] = [12, 12, 12];
const SETTLEMENT: [u32; 3] = [3, 5, 4];
const TOTAL_PRICE_THRESHOLD: Money = 20;
const AVERAGE_UNIT_PRICE_THRESHOLD: Money = 5;
const BIDS: [([u32; 3], [u32; 3]); 4] = [
    ([10, 10, 10], [2, 2, 2]),
    ([1, 0, 0], [9, 0, 0]),
    ([0, 2, 0], [0, 6, 0]),
    ([3, 0, 3], [4, 0, 4]),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fig2Row {
    pub strategy: String,
    pub candidates: Vec<usize>,
    pub winners: Vec<usize>,
    pub revenue: Money,
    /// Winners whose payment at the settlement prices exceeds their total bid.
    pub overpaying_winners: usize,
}

pub fn strategies() -> [PricingStrategy; 3] {
    [
        PricingStrategy::TwoTier,
        PricingStrategy::TotalPrice {
            threshold: TOTAL_PRICE_THRESHOLD,
        },
        PricingStrategy::AverageUnitPrice {
            threshold: AVERAGE_UNIT_PRICE_THRESHOLD,
        },
    ]
}

pub fn demo() -> Result<Vec<Fig2Row>, dcae_core::ModelError> {
    let catalog = DatasetCatalog::new(COPIES.to_vec())?;
    let bids = BIDS
        .iter()
        .map(|(k, b)| Bid::new(k.to_vec(), b.to_vec()))
        .collect::<Result<Vec<_>, _>>()?;
    let bids = BidSet::new(COPIES.len(), bids)?;
    let order = AllocationOrder::identity(bids.len());
    let p = PriceVector::new(SETTLEMENT.to_vec())?;

    strategies()
        .into_iter()
        .map(|strategy| {
            let out = run_round(&bids, &catalog, &order, &p, strategy)?;
            let mut overpaying = 0;
            for &j in &out.winners {
                let bid = &bids.bids()[j];
                if payment(bid, &p)? > bid.total_bid() {
                    overpaying += 1;
                }
            }
            Ok(Fig2Row {
                strategy: strategy.name().to_string(),
                candidates: out.candidates.into_iter().collect(),
                winners: out.winners.into_iter().collect(),
                revenue: out.revenue,
                overpaying_winners: overpaying,
            })
        })
        .collect()
}

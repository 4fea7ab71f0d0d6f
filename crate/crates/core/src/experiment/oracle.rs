//! Naive recomputation of round outcomes for cross-checking.
//!
//! Works on the raw numbers only and shares no code with the `auction`
//! module. Deliberately restricted to tiny instances.

use crate::auction::{AllocationOrder, BidSet, DatasetCatalog, Money, PriceVector, PricingStrategy};
use crate::error::{Error, Result};

pub const MAX_BUYERS: usize = 8;
pub const MAX_TYPES: usize = 4;
pub const MAX_PRICE_VECTORS: usize = 64;

/// Per-price-vector results of the brute-force recomputation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub scores: Vec<Money>,
    pub candidates: Vec<Vec<usize>>,
    pub winners: Vec<Vec<usize>>,
    pub best_index: usize,
    pub min_index: usize,
}

pub fn brute_force_oracle(
    catalog: &DatasetCatalog,
    bids: &BidSet,
    order: &AllocationOrder,
    price_vectors: &[PriceVector],
    strategy: PricingStrategy,
) -> Result<OracleReport> {
    let n = bids.len();
    let m = catalog.copies().len();
    if n > MAX_BUYERS || m > MAX_TYPES || price_vectors.len() > MAX_PRICE_VECTORS {
        return Err(Error::OracleLimit(format!(
            "n={n} m={m} |pi|={} exceeds {MAX_BUYERS}/{MAX_TYPES}/{MAX_PRICE_VECTORS}",
            price_vectors.len()
        )));
    }
    if price_vectors.is_empty() {
        return Err(Error::OracleLimit("no price vectors".into()));
    }
    let k: Vec<Vec<u64>> = bids
        .bids()
        .iter()
        .map(|b| b.quantities().iter().map(|&x| x as u64).collect())
        .collect();
    let b: Vec<Vec<u64>> = bids
        .bids()
        .iter()
        .map(|b| b.unit_prices().iter().map(|&x| x as u64).collect())
        .collect();
    let stock: Vec<u64> = catalog.copies().iter().map(|&x| x as u64).collect();
    let r = order.as_slice();

    let mut scores = Vec::new();
    let mut all_candidates = Vec::new();
    let mut all_winners = Vec::new();
    for pv in price_vectors {
        let p: Vec<u64> = pv.prices().iter().map(|&x| x as u64).collect();

        let mut candidate = vec![false; n];
        for j in 0..n {
            let mut bbar = 0;
            let mut pay = 0;
            let mut copies = 0;
            for i in 0..m {
                bbar += k[j][i] * b[j][i];
                pay += k[j][i] * p[i];
                copies += k[j][i];
            }
            if copies == 0 {
                continue;
            }
            candidate[j] = match strategy {
                PricingStrategy::TwoTier => bbar >= pay,
                PricingStrategy::TotalPrice { threshold } => bbar >= threshold,
                PricingStrategy::AverageUnitPrice { threshold } => {
                    (bbar as f64) / (copies as f64) >= threshold as f64
                }
            };
        }

        let mut avail = stock.clone();
        let mut won = vec![false; n];
        let mut pos = 0;
        while pos < r.len() && avail.iter().any(|&a| a > 0) {
            let j = r[pos];
            pos += 1;
            if !candidate[j] {
                continue;
            }
            let mut fits = true;
            for i in 0..m {
                if k[j][i] > avail[i] {
                    fits = false;
                }
            }
            if fits {
                won[j] = true;
                for i in 0..m {
                    avail[i] -= k[j][i];
                }
            }
        }

        let mut rev = 0;
        for j in 0..n {
            if won[j] {
                for i in 0..m {
                    rev += p[i] * k[j][i];
                }
            }
        }
        scores.push(rev);
        all_candidates.push((0..n).filter(|&j| candidate[j]).collect());
        all_winners.push((0..n).filter(|&j| won[j]).collect());
    }

    let mut best_index = 0;
    let mut min_index = 0;
    for idx in 0..scores.len() {
        if scores[idx] > scores[best_index] {
            best_index = idx;
        }
        if scores[idx] < scores[min_index] {
            min_index = idx;
        }
    }
    Ok(OracleReport {
        scores,
        candidates: all_candidates,
        winners: all_winners,
        best_index,
        min_index,
    })
}

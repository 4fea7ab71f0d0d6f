use dcae_core::auction::{
    allocate, payment, run_round, select_candidates, AllocationOrder, Bid, BidSet, DatasetCatalog,
    PriceVector, PricingStrategy,
};
use dcae_core::experiment::oracle::brute_force_oracle;
use dcae_core::experiment::{pair_ratio, score_table};
use dcae_core::mechanism::{sample_index, sensitivity_bound, ExponentialMechanism, SelectionDistribution};
use dcae_core::scenario::{draw_bid, gen_instance, gen_price_candidates, CopiesSpec, Instance, IntRange, ScenarioParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn toy_params() -> impl Strategy<Value = ScenarioParams> {
    (1usize..=3, 1usize..=6, 0u32..=4, 1u32..=8, 1u32..=10, 0u32..=6, any::<u64>()).prop_map(
        |(m, n, k_hi, b_hi, p_hi, copies_hi, seed)| ScenarioParams {
            m,
            n,
            k_range: IntRange::new(0, k_hi),
            b_range: IntRange::new(1, b_hi),
            p_range: IntRange::new(1, p_hi),
            copies: CopiesSpec::Uniform(IntRange::new(0, copies_hi)),
            q_max: k_hi.max(1),
            pi_size: 12,
            seed,
        },
    )
}

fn toy_case() -> impl Strategy<Value = (Instance, Vec<PriceVector>)> {
    (toy_params(), 0u64..1000).prop_map(|(params, t)| {
        (
            gen_instance(&params, t).unwrap(),
            gen_price_candidates(&params, t).unwrap(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn round_outcomes_are_feasible_and_nested((inst, pi) in toy_case()) {
        for p in &pi {
            let out = run_round(&inst.bids, &inst.catalog, &inst.order, p, PricingStrategy::TwoTier).unwrap();
            prop_assert!(out.winners.is_subset(&out.candidates));
            prop_assert!(out.candidates.iter().all(|&j| j < inst.bids.len()));
            for i in 0..inst.catalog.type_count() {
                let used: u64 = out.winners.iter().map(|&j| inst.bids.bids()[j].quantities()[i] as u64).sum();
                prop_assert!(used <= inst.catalog.copies()[i] as u64);
            }
            let recomputed: u64 = out.winners.iter().map(|&j| payment(&inst.bids.bids()[j], p).unwrap()).sum();
            prop_assert_eq!(out.revenue, recomputed);
            for (j, &pay) in out.payments.iter().enumerate() {
                if !out.winners.contains(&j) {
                    prop_assert_eq!(pay, 0);
                }
            }
            prop_assert!((0.0..=1.0).contains(&out.satisfaction()));
        }
    }

    #[test]
    fn two_tier_candidacy_is_exact((inst, pi) in toy_case()) {
        for p in &pi {
            let c = select_candidates(&inst.bids, p, PricingStrategy::TwoTier).unwrap();
            for (j, bid) in inst.bids.bids().iter().enumerate() {
                let expected = !bid.is_empty() && bid.total_bid() >= payment(bid, p).unwrap();
                prop_assert_eq!(c.contains(&j), expected);
            }
        }
    }

    #[test]
    fn candidacy_ignores_order((inst, pi) in toy_case(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut ids: Vec<usize> = (0..inst.bids.len()).collect();
        ids.shuffle(&mut ChaCha20Rng::seed_from_u64(seed));
        let other = AllocationOrder::new(ids).unwrap();
        for p in &pi {
            let a = run_round(&inst.bids, &inst.catalog, &inst.order, p, PricingStrategy::TwoTier).unwrap();
            let b = run_round(&inst.bids, &inst.catalog, &other, p, PricingStrategy::TwoTier).unwrap();
            prop_assert_eq!(a.candidates, b.candidates);
        }
    }

    #[test]
    fn rounds_match_oracle((inst, pi) in toy_case()) {
        for strategy in [
            PricingStrategy::TwoTier,
            PricingStrategy::TotalPrice { threshold: 10 },
            PricingStrategy::AverageUnitPrice { threshold: 4 },
        ] {
            let oracle = brute_force_oracle(&inst.catalog, &inst.bids, &inst.order, &pi, strategy).unwrap();
            for (idx, p) in pi.iter().enumerate() {
                let out = run_round(&inst.bids, &inst.catalog, &inst.order, p, strategy).unwrap();
                prop_assert_eq!(out.revenue, oracle.scores[idx]);
                prop_assert_eq!(out.candidates.iter().copied().collect::<Vec<_>>(), oracle.candidates[idx].clone());
                prop_assert_eq!(out.winners.iter().copied().collect::<Vec<_>>(), oracle.winners[idx].clone());
            }
        }
    }

    #[test]
    fn rounds_are_deterministic((inst, pi) in toy_case()) {
        let (a, oa) = score_table(&inst, pi.clone(), PricingStrategy::TwoTier).unwrap();
        let (b, ob) = score_table(&inst, pi, PricingStrategy::TwoTier).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(oa, ob);
    }

    // More stock never loses a winner as long as every buyer that was
    // blocked before stays blocked.
    #[test]
    fn extra_stock_keeps_winners((inst, pi) in toy_case(), extra in proptest::collection::vec(0u32..4, 3)) {
        let bigger: Vec<u32> = inst.catalog.copies().iter().zip(&extra).map(|(k, e)| k + e).collect();
        let bigger = DatasetCatalog::new(bigger).unwrap();
        for p in &pi {
            let cands = select_candidates(&inst.bids, p, PricingStrategy::TwoTier).unwrap();
            let small_w = allocate(&cands, &inst.bids, &inst.catalog, &inst.order).unwrap();
            let big_w = allocate(&cands, &inst.bids, &bigger, &inst.order).unwrap();
            let skipped_small: Vec<usize> = cands.difference(&small_w).copied().collect();
            if skipped_small.iter().all(|j| !big_w.contains(j)) {
                prop_assert!(small_w.is_subset(&big_w));
            }
        }
    }

    #[test]
    fn generated_bids_are_rational_and_in_range(params in toy_params(), t in 0u64..100) {
        let inst = gen_instance(&params, t).unwrap();
        for bid in inst.bids.bids() {
            for (&k, &b) in bid.quantities().iter().zip(bid.unit_prices()) {
                prop_assert_eq!(k == 0, b == 0);
                prop_assert!(params.k_range.contains(k));
                prop_assert!(k == 0 || params.b_range.contains(b));
            }
        }
        if let CopiesSpec::Uniform(r) = params.copies {
            prop_assert!(inst.catalog.copies().iter().all(|&c| r.contains(c)));
        }
        for p in gen_price_candidates(&params, t).unwrap() {
            prop_assert!(p.prices().iter().all(|&v| params.p_range.contains(v)));
        }
    }

    #[test]
    fn distribution_normalizes(
        scores in proptest::collection::vec(0u64..=1_000_000_000, 1..40),
        log_coef in -9.0f64..3.0,
    ) {
        // epsilon / (2 * delta) = 10^log_coef
        let mech = ExponentialMechanism::new(2.0 * 10f64.powf(log_coef), 1.0).unwrap();
        let s: Vec<f64> = scores.iter().map(|&x| x as f64).collect();
        let d = mech.distribution_from_scores(&s).unwrap();
        let total: f64 = d.probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
        prop_assert!(d.probabilities().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn distribution_is_shift_invariant(
        scores in proptest::collection::vec(0u64..=1_000_000, 1..30),
        shift in 0u64..=1_000_000_000,
        eps in 0.01f64..5.0,
    ) {
        let mech = ExponentialMechanism::new(eps, 1000.0).unwrap();
        let a: Vec<f64> = scores.iter().map(|&x| x as f64).collect();
        let b: Vec<f64> = scores.iter().map(|&x| (x + shift) as f64).collect();
        let da = mech.distribution_from_scores(&a).unwrap();
        let db = mech.distribution_from_scores(&b).unwrap();
        for (x, y) in da.probabilities().iter().zip(db.probabilities()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn higher_score_higher_probability(
        scores in proptest::collection::vec(0u64..=10_000, 2..30),
        eps in 0.05f64..5.0,
    ) {
        let mech = ExponentialMechanism::new(eps, 50.0).unwrap();
        let s: Vec<f64> = scores.iter().map(|&x| x as f64).collect();
        let d = mech.distribution_from_scores(&s).unwrap();
        let p = d.probabilities();
        for i in 0..s.len() {
            for k in 0..s.len() {
                if s[i] > s[k] {
                    prop_assert!(p[i] > p[k], "p[{}]={} p[{}]={}", i, p[i], k, p[k]);
                }
            }
        }
    }

    #[test]
    fn tiny_epsilon_is_uniform(scores in proptest::collection::vec(0u64..=100_000, 1..50)) {
        let mech = ExponentialMechanism::new(1e-12, 1.0).unwrap();
        let s: Vec<f64> = scores.iter().map(|&x| x as f64).collect();
        let d = mech.distribution_from_scores(&s).unwrap();
        let u = 1.0 / s.len() as f64;
        prop_assert!(d.probabilities().iter().all(|&p| (p - u).abs() <= 1e-6));
    }

    #[test]
    fn wide_gap_concentrates_on_argmax(
        scores in proptest::collection::vec(0u64..=1000, 1..50),
        eps in 0.1f64..2.0,
    ) {
        let mut scores = scores;
        let max = *scores.iter().max().unwrap();
        scores.push(max + 100);
        // eps * gap / (2 * delta) == 50 for gap = 100
        let delta = eps * 100.0 / (2.0 * 50.0);
        let mech = ExponentialMechanism::new(eps, delta).unwrap();
        let s: Vec<f64> = scores.iter().map(|&x| x as f64).collect();
        let d = mech.distribution_from_scores(&s).unwrap();
        prop_assert!(*d.probabilities().last().unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn neighbor_ratio_within_exp_epsilon(params in toy_params(), t in 0u64..1000, eps in 0.05f64..2.0) {
        let inst = gen_instance(&params, t).unwrap();
        let pi = gen_price_candidates(&params, t).unwrap();
        let delta = sensitivity_bound(params.m, params.q_max, params.p_range.hi).unwrap() as f64;
        let mech = ExponentialMechanism::new(eps, delta).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(t);
        for buyer in 0..params.n {
            let neighbor = inst.bids.with_bid(buyer, draw_bid(&params, &mut rng)).unwrap();
            let r = pair_ratio(&inst, &neighbor, &pi, &mech).unwrap();
            prop_assert!(r <= eps.exp() * (1.0 + 1e-9), "ratio {} eps {}", r, eps);
        }
    }
}

#[test]
fn sampler_fits_its_distribution() {
    let probs = [0.1, 0.2, 0.3, 0.15, 0.25];
    let dist = SelectionDistribution::new(probs.to_vec()).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(20_240_601);
    let mut counts = [0u64; 5];
    for _ in 0..100_000 {
        counts[sample_index(&dist, &mut rng)] += 1;
    }
    let stat = dcae_core::stats::chi_square_statistic(&counts, &probs);
    let p_value = 1.0 - ChiSquared::new(4.0).unwrap().cdf(stat);
    assert!(p_value > 0.001, "chi2 {stat}, p {p_value}, counts {counts:?}");
}

#[test]
fn brute_force_trace_of_two_buyer_market() {
    let catalog = DatasetCatalog::new(vec![1, 1]).unwrap();
    let bids = BidSet::new(
        2,
        vec![
            Bid::new(vec![1, 0], vec![5, 0]).unwrap(),
            Bid::new(vec![1, 1], vec![5, 5]).unwrap(),
        ],
    )
    .unwrap();
    let pi = vec![PriceVector::new(vec![3, 3]).unwrap()];
    let ba = AllocationOrder::new(vec![1, 0]).unwrap();
    let ab = AllocationOrder::new(vec![0, 1]).unwrap();
    let r = brute_force_oracle(&catalog, &bids, &ba, &pi, PricingStrategy::TwoTier).unwrap();
    assert_eq!((r.scores[0], r.winners[0].clone()), (6, vec![1]));
    let r = brute_force_oracle(&catalog, &bids, &ab, &pi, PricingStrategy::TwoTier).unwrap();
    assert_eq!((r.scores[0], r.winners[0].clone()), (3, vec![0]));
}

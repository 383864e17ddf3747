mod common;

use proptest::prelude::*;
use rand::Rng;
use schulze::ballots::random_profile;
use schulze::bottleneck::{apbp, winners_from_bottlenecks};
use schulze::majority_graph::{
    build_comparison_graph, build_wmg_fast, build_wmg_naive, parse_graph, random_margin_graph,
};
use schulze::Strength;

#[test]
fn fast_construction_matches_naive_on_1000_profiles() {
    let mut rng = common::rng(0x5eed_0001);
    for case in 0..1000u64 {
        let m = rng.gen_range(1..=24);
        let n = rng.gen_range(1..=48);
        let p = if case % 2 == 0 { 0.0 } else { 0.3 };
        let profile = random_profile(m, n, p, rng.gen());
        let naive = build_wmg_naive(&profile);
        let block = if case % 3 == 0 {
            Some(rng.gen_range(1..=2 * m))
        } else {
            None
        };
        let fast = build_wmg_fast(&profile, block);
        assert_eq!(fast, naive, "case {case}: m={m} n={n} p={p} block={block:?}");
    }
}

#[test]
fn naive_margins_match_oracle() {
    let mut rng = common::rng(7);
    for _ in 0..200 {
        let profile = random_profile(rng.gen_range(1..=10), rng.gen_range(1..=20), 0.4, rng.gen());
        let g = build_wmg_naive(&profile);
        assert_eq!(common::graph_weights(&g), common::margins_oracle(&profile));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn margins_are_antisymmetric_and_bounded(m in 1usize..=12, n in 1usize..=30, seed in any::<u64>()) {
        let g = build_wmg_naive(&random_profile(m, n, 0.25, seed));
        prop_assert!(g.is_antisymmetric());
        for u in 0..m {
            for v in 0..m {
                prop_assert!(g.weight(u, v).unsigned_abs() <= n as u64);
            }
        }
    }

    #[test]
    fn strict_profiles_have_parity_of_n(m in 2usize..=10, n in 1usize..=30, seed in any::<u64>()) {
        let g = build_wmg_naive(&random_profile(m, n, 0.0, seed));
        for u in 0..m {
            for v in 0..m {
                if u != v {
                    prop_assert_eq!((g.weight(u, v) - n as i64).rem_euclid(2), 0);
                }
            }
        }
    }

    #[test]
    fn margin_ranks_keep_winners(m in 1usize..=9, n in 1usize..=20, seed in any::<u64>()) {
        // Ranking the margins is a monotone relabelling of the weights.
        let profile = random_profile(m, n, 0.3, seed);
        let plain = winners_from_bottlenecks(&apbp(&build_wmg_naive(&profile)));
        let ranked = winners_from_bottlenecks(&apbp(&build_comparison_graph(&profile, Strength::Margin)));
        prop_assert_eq!(plain, ranked);
    }

    #[test]
    fn comparison_graphs_are_positive_ranks(m in 2usize..=8, n in 1usize..=15, seed in any::<u64>()) {
        let profile = random_profile(m, n, 0.3, seed);
        for s in [Strength::Margin, Strength::WinningVotes, Strength::LosingVotes, Strength::Ratio] {
            let g = build_comparison_graph(&profile, s);
            for u in 0..m {
                for v in 0..m {
                    if u != v {
                        prop_assert!(g.weight(u, v) >= 1);
                    }
                }
            }
        }
    }

    #[test]
    fn graph_text_round_trip(m in 1usize..=10, bound in 0i64..=50, seed in any::<u64>()) {
        let g = random_margin_graph(m, bound, seed);
        prop_assert!(g.is_antisymmetric());
        prop_assert_eq!(parse_graph(&g.to_text()).unwrap(), g);
    }
}

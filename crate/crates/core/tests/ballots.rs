#![allow(clippy::needless_range_loop)]

mod common;

use proptest::prelude::*;
use schulze::ballots::{pairwise_tallies, parse_profile, random_profile, rank_encode};

fn profile_params() -> impl Strategy<Value = (usize, usize, f64, u64)> {
    (
        1usize..=9,
        1usize..=25,
        prop::sample::select(vec![0.0, 0.3, 0.7, 1.0]),
        any::<u64>(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn tallies_match_group_count((m, n, p, seed) in profile_params()) {
        let profile = random_profile(m, n, p, seed);
        let t = pairwise_tallies(&profile);
        let oracle = common::tally_oracle(&profile);
        for u in 0..m {
            for v in 0..m {
                prop_assert_eq!(t.get(u, v), oracle[u][v]);
            }
            prop_assert_eq!(t.get(u, u), 0);
        }
    }

    #[test]
    fn tallies_bound_by_voters((m, n, p, seed) in profile_params()) {
        let profile = random_profile(m, n, p, seed);
        let t = pairwise_tallies(&profile);
        for u in 0..m {
            for v in 0..m {
                prop_assert!(t.get(u, v) + t.get(v, u) <= n as u64);
            }
        }
    }

    #[test]
    fn ballot_text_round_trip((m, n, p, seed) in profile_params()) {
        let profile = random_profile(m, n, p, seed);
        let parsed = parse_profile(&profile.to_ballot_text()).unwrap();
        prop_assert_eq!(parsed, profile);
    }

    #[test]
    fn rank_encoding_orders_groups((m, n, p, seed) in profile_params()) {
        let profile = random_profile(m, n, p, seed);
        let ranks = rank_encode(&profile);
        for (a, vote) in profile.votes().iter().enumerate() {
            for (level, group) in vote.groups().iter().enumerate() {
                for &c in group {
                    prop_assert_eq!(ranks.rank(a, c) as usize, level);
                }
            }
        }
    }
}

#[test]
fn multiplicity_expands_votes() {
    let p = parse_profile("candidates: a,b,c\na > b = c x4\nc > a > b").unwrap();
    assert_eq!(p.num_voters(), 5);
    let t = pairwise_tallies(&p);
    assert_eq!((t.get(0, 1), t.get(0, 2), t.get(2, 0), t.get(1, 2)), (5, 4, 1, 0));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = parse_profile("candidates: a,b,c\na > b > c\na > b > q\n").unwrap_err();
    assert_eq!(err.line, 3);
    let err = parse_profile("candidates: a,b\n\n# note\na > a\n").unwrap_err();
    assert_eq!(err.line, 4);
    assert!(parse_profile("a > b\n").is_err());
    assert!(parse_profile("candidates: a,b\n").is_err());
}

mod common;

use common::{first_passage_brute_force, q};
use num_rational::BigRational;
use num_traits::Zero;
use polya_core::enumerate::expected_black_fraction;
use polya_core::{
    enumerate_sequences, equalization_probability, first_passage_by_enumeration, first_passage_dp,
    marginal_black_distribution, UrnConfig,
};
use proptest::prelude::*;

fn urn(b: u64, w: u64) -> UrnConfig {
    UrnConfig::new(b, w).unwrap()
}

#[test]
fn dp_matches_hand_rolled_paths() {
    for (b, w) in [(2, 1), (1, 3), (4, 2), (3, 3)] {
        for target in -3..=3 {
            for n in 0..=10u32 {
                let dp = first_passage_dp(urn(b, w), target, n as u64).unwrap();
                assert_eq!(
                    dp.cumulative,
                    first_passage_brute_force(b, w, target, n),
                    "b={b} w={w} m={target} n={n}"
                );
            }
        }
    }
}

#[test]
fn enumerator_matches_hand_rolled_paths() {
    for (b, w) in [(2, 1), (5, 1)] {
        for n in 0..=9u32 {
            assert_eq!(
                first_passage_by_enumeration(urn(b, w), 0, n).unwrap(),
                first_passage_brute_force(b, w, 0, n)
            );
        }
    }
}

#[test]
fn truncated_probability_approaches_closed_form_from_below() {
    for (b, w) in [(2, 1), (3, 2), (5, 3), (6, 1)] {
        let exact = equalization_probability(urn(b, w)).into_inner();
        let mut last_gap: Option<BigRational> = None;
        for n in [10, 20, 40, 80, 160] {
            let gap = &exact - first_passage_dp(urn(b, w), 0, n).unwrap().cumulative;
            assert!(gap > BigRational::zero());
            if let Some(prev) = &last_gap {
                assert!(gap < *prev);
            }
            last_gap = Some(gap);
        }
    }
}

#[test]
fn marginal_agrees_with_enumeration() {
    for (b, w) in [(2, 1), (1, 1), (3, 4)] {
        for n in 0..=10u32 {
            let mut by_count = vec![BigRational::zero(); n as usize + 1];
            for s in enumerate_sequences(urn(b, w), n).unwrap() {
                by_count[s.black_count()] += s.probability;
            }
            assert_eq!(marginal_black_distribution(urn(b, w), n as u64), by_count);
        }
    }
}

#[test]
fn hit_pmf_sums_to_cumulative() {
    let t = first_passage_dp(urn(4, 1), 0, 101).unwrap();
    let sum = t.hit_pmf.iter().fold(BigRational::zero(), |a, p| a + p);
    assert_eq!(sum, t.cumulative);
    assert!(t.cumulative < q(1, 1));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn martingale_mean(b in 1u64..12, w in 1u64..12, n in 0u64..40) {
        prop_assert_eq!(expected_black_fraction(urn(b, w), n), q(b as i64, (b + w) as i64));
    }

    #[test]
    fn dp_cumulative_bounded(b in 1u64..10, w in 1u64..10, m in -6i64..6, n in 0u64..60) {
        let t = first_passage_dp(urn(b, w), m, n).unwrap();
        prop_assert!(t.cumulative <= q(1, 1));
        prop_assert!(t.hit_pmf.iter().all(|p| *p >= BigRational::zero()));
        let gap = (b as i64 - w as i64 - m).abs();
        for (i, p) in t.hit_pmf.iter().enumerate() {
            if (i as i64 - gap) % 2 != 0 {
                prop_assert!(p.is_zero());
            }
        }
    }
}

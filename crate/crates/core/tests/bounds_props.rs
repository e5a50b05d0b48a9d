use proptest::prelude::*;
use weighted_sums::bounds::{
    bound_independent, bound_iid, bound_markov, check_assumptions, lemma_fg_gap, BlockSpec, MarkovBlock,
};
use weighted_sums::harness::gen_matched_pair;
use weighted_sums::markov::MBParams;
use weighted_sums::{LatticeMeasure, Side};

fn example() -> (LatticeMeasure, LatticeMeasure) {
    weighted_sums::harness::config::example_pair()
}

fn two_blocks(n1: u64, n2: u64, w1: f64, w2: f64) -> Vec<BlockSpec> {
    let (f, g) = example();
    vec![BlockSpec::iid(f.clone(), g.clone(), n1, w1), BlockSpec::iid(f, g, n2, w2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factor_is_its_recomposition(n1 in 1u64..500, n2 in 1u64..500, w in 1.0f64..3.0, s in 1u32..5) {
        let blocks = two_blocks(n1, n2, 1.0, w);
        for r in [bound_independent(&blocks, s), bound_iid(&blocks, s).unwrap()] {
            prop_assert_eq!(r.factor, r.recompose());
            prop_assert!(r.factor > 0.0 && r.factor.is_finite());
            prop_assert!(r.absolute_constant_excluded);
        }
    }

    #[test]
    fn factor_ignores_common_weight_scale(n1 in 1u64..500, n2 in 1u64..500, w in 1.0f64..3.0, c in 0.1f64..10.0) {
        let a = bound_iid(&two_blocks(n1, n2, 1.0, w), 3).unwrap().factor;
        let b = bound_iid(&two_blocks(n1, n2, c, c * w), 3).unwrap().factor;
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn more_summands_shrink_the_iid_factor(n in 1u64..1000, extra in 1u64..1000) {
        let a = bound_iid(&two_blocks(n, n, 1.0, 2f64.sqrt()), 3).unwrap().factor;
        let b = bound_iid(&two_blocks(n + extra, n + extra, 1.0, 2f64.sqrt()), 3).unwrap().factor;
        prop_assert!(b < a);
    }

    #[test]
    fn markov_factor_recomposes(p in 0.01f64..0.5, q_bar in 0.001f64..0.033, n in 10u64..1000) {
        let params = MBParams::new(p, q_bar, n).unwrap();
        let r = bound_markov(&[MarkovBlock { params, weight: 1.0 }], 2);
        prop_assert_eq!(r.factor, r.recompose());
        prop_assert_eq!(r.warnings.is_empty(), q_bar >= (n as f64).powi(-2));
    }
}

#[test]
fn fg_gap_holds_on_generated_pairs() {
    let mut checked = 0;
    for seed in 0..500u64 {
        let s = 1 + (seed % 3) as u32;
        let (f, g) = gen_matched_pair(seed, s).unwrap();
        for k in 1..=s {
            for side in [Side::Plus, Side::Minus] {
                let (a, b) = (f.factorial_moment(k, side), g.factorial_moment(k, side));
                assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "seed {seed} k {k}");
            }
        }
        let gap = lemma_fg_gap(&f, &g, s).unwrap();
        assert!(gap.holds(), "seed {seed}: {} > {}", gap.tv_gap, gap.bound);
        checked += 1;
    }
    assert_eq!(checked, 500);
}

#[test]
fn generated_pairs_pass_assumptions_with_enough_summands() {
    for seed in 0..100u64 {
        let (f, g) = gen_matched_pair(seed, 3).unwrap();
        let u = weighted_sums::measure::smoothness_u(&f, Some(&g));
        let n = (1.0 / u).ceil() as u64 + 1;
        let report = check_assumptions(&[BlockSpec::iid(f, g, n, 1.0)], 3);
        assert!(report.passed, "seed {seed}: {:?}", report.warnings);
    }
}

#[test]
fn mismatched_moments_are_reported() {
    let (f, _) = example();
    let g = LatticeMeasure::from_entries([(0, 0.5), (1, 0.5)]);
    let report = check_assumptions(&[BlockSpec::iid(f.clone(), g.clone(), 10, 1.0)], 3);
    assert!(!report.passed);
    assert!(lemma_fg_gap(&f, &g, 3).is_err());
}

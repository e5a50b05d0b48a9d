use proptest::prelude::*;
use weighted_sums::weighted::{lift, weighted_sum_distribution, Component};
use weighted_sums::{LatticeMeasure, WeightBasis, WeightedMeasure};

fn distribution() -> impl Strategy<Value = LatticeMeasure> {
    (-4i64..=4, prop::collection::vec(0.01f64..1.0, 1..6)).prop_map(|(lo, m)| {
        let total: f64 = m.iter().sum();
        LatticeMeasure::from_masses(lo, m.into_iter().map(|x| x / total).collect())
    })
}

fn sqrt2_basis() -> WeightBasis {
    WeightBasis::new(vec![1.0, 2f64.sqrt()]).unwrap()
}

fn random_two_block(f: &LatticeMeasure, g: &LatticeMeasure) -> WeightedMeasure {
    let basis = sqrt2_basis();
    lift(f, 0, &basis).unwrap().wconvolve(&lift(g, 1, &basis).unwrap()).unwrap()
}

/// Kolmogorov distance of two-block laws by sorting every atom value, with
/// no shared code beyond the lattice pmfs.
fn distance_oracle(s1: &LatticeMeasure, s2: &LatticeMeasure, z1: &LatticeMeasure, z2: &LatticeMeasure) -> f64 {
    let w = 2f64.sqrt();
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    for (a, x) in s1.entries() {
        for (b, y) in s2.entries() {
            atoms.push((a as f64 + w * b as f64, x * y));
        }
    }
    for (a, x) in z1.entries() {
        for (b, y) in z2.entries() {
            atoms.push((a as f64 + w * b as f64, -x * y));
        }
    }
    atoms.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let mut best = 0.0f64;
    let mut cdf = 0.0;
    let mut i = 0;
    while i < atoms.len() {
        let v = atoms[i].0;
        while i < atoms.len() && (atoms[i].0 - v).abs() <= 1e-9 * (1.0 + v.abs()) {
            cdf += atoms[i].1;
            i += 1;
        }
        best = best.max(cdf.abs());
    }
    best
}

proptest! {
    #[test]
    fn lifting_commutes_with_convolution(f in distribution(), g in distribution()) {
        let basis = sqrt2_basis();
        let a = lift(&f.convolve(&g), 1, &basis).unwrap();
        let b = lift(&f, 1, &basis).unwrap().wconvolve(&lift(&g, 1, &basis).unwrap()).unwrap();
        prop_assert!((a.tv_norm() - b.tv_norm()).abs() <= 1e-12);
        for (c, m) in a.entries() {
            let p = weighted_sums::SupportPoint { coeffs: c.to_vec() };
            prop_assert!((b.get(&p) - m).abs() <= 1e-12);
        }
    }

    #[test]
    fn distance_is_a_metric(
        f1 in distribution(), f2 in distribution(),
        g1 in distribution(), g2 in distribution(),
        h1 in distribution(), h2 in distribution(),
    ) {
        let (a, b, c) = (random_two_block(&f1, &f2), random_two_block(&g1, &g2), random_two_block(&h1, &h2));
        let ab = a.wkolmogorov_distance(&b).unwrap();
        prop_assert_eq!(ab, b.wkolmogorov_distance(&a).unwrap());
        let ac = a.wkolmogorov_distance(&c).unwrap();
        let cb = c.wkolmogorov_distance(&b).unwrap();
        prop_assert!(ab <= ac + cb + 1e-12);
        prop_assert!(a.wkolmogorov_distance(&a).unwrap() <= 1e-15);
    }

    #[test]
    fn single_unit_weight_agrees_with_lattice(f in distribution(), g in distribution(), n in 1u64..6) {
        let basis = WeightBasis::new(vec![1.0]).unwrap();
        let wf = weighted_sum_distribution(&[Component { measure: f.clone(), count: n, index: 0 }], &basis).unwrap();
        let wg = weighted_sum_distribution(&[Component { measure: g.clone(), count: n, index: 0 }], &basis).unwrap();
        let lattice = (&f.power(n) - &g.power(n)).kolmogorov_norm();
        prop_assert!((wf.wkolmogorov_distance(&wg).unwrap() - lattice).abs() <= 1e-12);
        prop_assert!((wf.wconcentration(1.5) - f.power(n).concentration(1.5)).abs() <= 1e-12);
    }

    #[test]
    fn distance_matches_sorting_oracle(f1 in distribution(), f2 in distribution(), g1 in distribution(), g2 in distribution()) {
        let d = random_two_block(&f1, &f2).wkolmogorov_distance(&random_two_block(&g1, &g2)).unwrap();
        prop_assert!((d - distance_oracle(&f1, &f2, &g1, &g2)).abs() <= 1e-12);
    }
}

#[test]
fn identical_component_lists_have_zero_distance() {
    let f = LatticeMeasure::from_entries([(0, 0.375), (1, 0.5), (4, 0.125)]);
    let comps = [Component { measure: f.clone(), count: 5, index: 0 }, Component { measure: f, count: 7, index: 1 }];
    let a = weighted_sum_distribution(&comps, &sqrt2_basis()).unwrap();
    let b = weighted_sum_distribution(&comps, &sqrt2_basis()).unwrap();
    assert_eq!(a.wkolmogorov_distance(&b).unwrap(), 0.0);
}

#[test]
fn example_distance_matches_sorting_oracle() {
    let f = LatticeMeasure::from_entries([(0, 0.375), (1, 0.5), (4, 0.125)]);
    let g = LatticeMeasure::from_entries([(0, 0.45), (1, 0.25), (2, 0.25), (5, 0.05)]);
    for (n1, n2) in [(4, 16), (8, 64)] {
        let law = |m: &LatticeMeasure| {
            weighted_sum_distribution(
                &[Component { measure: m.clone(), count: n1, index: 0 }, Component { measure: m.clone(), count: n2, index: 1 }],
                &sqrt2_basis(),
            )
            .unwrap()
        };
        let d = law(&f).wkolmogorov_distance(&law(&g)).unwrap();
        let oracle = distance_oracle(&f.power(n1), &f.power(n2), &g.power(n1), &g.power(n2));
        assert!((d - oracle).abs() <= 1e-13, "{d} {oracle}");
    }
}

#[test]
fn resource_guard_trips() {
    let basis = sqrt2_basis();
    let wide = LatticeMeasure::from_masses(0, vec![1.0 / 4000.0; 4000]);
    let err = lift(&wide, 0, &basis).unwrap().wconvolve(&lift(&wide, 1, &basis).unwrap()).unwrap_err();
    assert!(matches!(err, weighted_sums::Error::ResourceLimit { points: 16_000_000, .. }), "{err}");
}

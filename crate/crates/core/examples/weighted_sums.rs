// Laws of w_1 S_1 + w_2 S_2 with incommensurable weights, kept exact by
// storing atoms as integer coefficient vectors.

use weighted_sums::weighted::{lift, weighted_sum_distribution, Component};
use weighted_sums::{LatticeMeasure, WeightBasis};

pub fn main() -> weighted_sums::Result<()> {
    let basis = WeightBasis::new(vec![1.0, 2f64.sqrt()])?;
    let f = LatticeMeasure::from_entries([(0, 0.375), (1, 0.5), (4, 0.125)]);
    let g = LatticeMeasure::from_entries([(0, 0.45), (1, 0.25), (2, 0.25), (5, 0.05)]);

    let lifted = lift(&f, 1, &basis)?;
    println!("F on sqrt(2) Z: {}", serde_json::to_string(&lifted)?);

    for (n1, n2) in [(2, 4), (4, 16), (8, 64)] {
        let s = weighted_sum_distribution(
            &[Component { measure: f.clone(), count: n1, index: 0 }, Component { measure: f.clone(), count: n2, index: 1 }],
            &basis,
        )?;
        let z = weighted_sum_distribution(
            &[Component { measure: g.clone(), count: n1, index: 0 }, Component { measure: g.clone(), count: n2, index: 1 }],
            &basis,
        )?;
        println!(
            "n1 = {n1:2}, n2 = {n2:2}: {:6} atoms, mass {:.15}, |L(S) - L(Z)|_K = {:.6e}",
            s.len(),
            s.total_mass(),
            s.wkolmogorov_distance(&z)?
        );
    }

    // commensurable weights collide and are merged at CDF time
    let basis = WeightBasis::new(vec![1.0, 2.0])?;
    let x = lift(&LatticeMeasure::bernoulli(0.5), 0, &basis)?.wconvolve(&lift(&LatticeMeasure::bernoulli(0.5), 1, &basis)?)?;
    println!("B + 2B' atoms: {:?}", x.merged_atoms());
    Ok(())
}

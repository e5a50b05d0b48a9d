// Assumption checks, bound factors and the moment-matched gap.

use weighted_sums::bounds::{
    bound_independent, bound_independent_sym, bound_iid, check_assumptions, lemma_fg_even_refinement, lemma_fg_gap,
    BlockSpec,
};
use weighted_sums::harness::generate::gen_matched_pair;
use weighted_sums::LatticeMeasure;

pub fn main() -> weighted_sums::Result<()> {
    let f = LatticeMeasure::from_entries([(0, 0.375), (1, 0.5), (4, 0.125)]);
    let g = LatticeMeasure::from_entries([(0, 0.45), (1, 0.25), (2, 0.25), (5, 0.05)]);
    let blocks = vec![
        BlockSpec::iid(f.clone(), g.clone(), 10, 1.0),
        BlockSpec::iid(f.clone(), g.clone(), 100, 2f64.sqrt()),
    ];

    for s in [3, 4] {
        println!("s = {s}: {:?}", check_assumptions(&blocks, s));
    }
    let iid = bound_iid(&blocks, 3)?;
    println!("iid factor {:.6}", iid.factor);
    println!("{}", serde_json::to_string_pretty(&iid)?);
    println!("independent factor {:.6}", bound_independent(&blocks, 3).factor);
    match bound_independent_sym(&blocks, 3) {
        Ok(r) => println!("symmetric factor {}", r.factor),
        Err(e) => println!("symmetric bound: {e}"),
    }
    println!("symmetric factor at s = 2: {:.6}", bound_independent_sym(&blocks, 2)?.factor);

    println!("gap: {:?}", lemma_fg_gap(&f, &g, 3)?);
    println!("even refinement at s = 2: {:?}", lemma_fg_even_refinement(&f, &g, 2)?);

    for s in 1..=3 {
        let (a, b) = gen_matched_pair(42, s)?;
        println!("random pair, s = {s}: {:?}", lemma_fg_gap(&a, &b, s)?);
    }
    Ok(())
}

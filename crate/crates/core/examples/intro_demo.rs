// Poisson(n) + Bernoulli(1/3) against Poisson(n) + Bernoulli(1/4): the
// distance shrinks like n^{-1/2}.

use weighted_sums::harness::demo_intro;

pub fn main() -> weighted_sums::Result<()> {
    let result = demo_intro(&[4, 16, 64, 256, 1024], 1e-12)?;
    for row in &result.rows {
        println!("n = {:5}: |L(S) - L(Z)|_K = {:.6e}", row.n, row.distance.unwrap());
    }
    println!("slope {:.4}", result.distance_fit.unwrap().slope);
    Ok(())
}

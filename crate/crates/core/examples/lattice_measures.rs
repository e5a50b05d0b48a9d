// Signed measures on the integer lattice: convolution, norms, exponentials,
// factorial moments, smoothness and concentration.

use weighted_sums::measure::smoothness_u;
use weighted_sums::{CfOrder, LatticeMeasure, Side};

pub fn main() {
    let f = LatticeMeasure::from_entries([(0, 0.375), (1, 0.5), (4, 0.125)]);
    let g = LatticeMeasure::from_entries([(0, 0.45), (1, 0.25), (2, 0.25), (5, 0.05)]);

    let diff = &f - &g;
    println!("F - G = {diff:?}");
    println!("||F - G|| = {}, |F - G|_K = {}", diff.tv_norm(), diff.kolmogorov_norm());

    for k in 1..=4 {
        println!(
            "nu_{k}+: F = {}, G = {}",
            f.factorial_moment(k, Side::Plus),
            g.factorial_moment(k, Side::Plus)
        );
    }
    println!(
        "u(F) = {} (norm route) = {} (overlap route); u(F, G) = {}",
        f.smoothness_via_norm(),
        f.smoothness_via_overlap(),
        smoothness_u(&f, Some(&g))
    );
    println!("Q(F, 1) = {}", f.concentration(1.0));

    let f10 = f.power(10);
    let m = f10.moments();
    println!("F^10: {} points, mean {}, variance {}", f10.len(), m.mean, m.variance);

    // Poisson(3) as exp{3 (delta_1 - delta_0)}
    let step = &LatticeMeasure::delta(1) - &LatticeMeasure::delta(0);
    let (poisson, realized) = (&step * 3.0).exp_measure(1e-12);
    println!(
        "Poisson(3){{0}} = {:.15} (exact {:.15}), truncation bound {realized:.1e}",
        poisson.get(0),
        (-3.0f64).exp()
    );

    let t = 0.7;
    let value = f.char_fn(t, 0.0, CfOrder::Value);
    let slope = f.char_fn(t, f.moments().mean, CfOrder::Derivative);
    println!("F^({t}) = {value:.6}, centered derivative {slope:.6}");

    println!("JSON: {}", serde_json::to_string(&f).unwrap());
}

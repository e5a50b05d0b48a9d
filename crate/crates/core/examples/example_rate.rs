// The two-block worked example: exact Kolmogorov distances for
// n1 = ceil(sqrt n), n2 = n, w = (1, sqrt 2), next to the iid bound factor.

use weighted_sums::harness::{fit_rate, run_example};

pub fn main() -> weighted_sums::Result<()> {
    let result = run_example(&[16, 64, 256, 1024])?;
    let p = result.prerequisites.as_ref().expect("example prerequisites");
    println!(
        "nu+(F) = {:?}, nu+(G) = {:?}, beta4+ = {}, u = {}, franken = {}",
        p.nu_f, p.nu_g, p.beta4_plus, p.u, p.franken
    );
    println!("{:>6} {:>4} {:>14} {:>12} {:>12}", "n", "n1", "distance", "factor", "ratio");
    for row in &result.rows {
        println!(
            "{:>6} {:>4} {:>14.6e} {:>12.6} {:>12.6e}",
            row.n,
            row.counts[0],
            row.distance.unwrap(),
            row.factor.unwrap(),
            row.ratio.unwrap()
        );
    }
    let fit = result.distance_fit.unwrap();
    println!("distance slope {:.4}, factor slope {:.4}", fit.slope, result.factor_fit.unwrap().slope);
    println!("ratio spread {:.3}", result.ratio_spread.unwrap());

    // (1/n1 + 1/n2) / sqrt(n1 + n2), the order displayed for this example
    let display: Vec<(f64, f64)> = result
        .rows
        .iter()
        .map(|r| {
            let (a, b) = (r.counts[0] as f64, r.counts[1] as f64);
            (r.n as f64, r.distance.unwrap() / ((1.0 / a + 1.0 / b) / (a + b).sqrt()))
        })
        .collect();
    println!("ratio to (1/n1 + 1/n2)/sqrt(n1 + n2): {display:?}");
    println!("slope of that ratio {:.4}", fit_rate(&display)?.slope);
    Ok(())
}

// Markov binomial sums against the signed compound-Poisson measure D.

use weighted_sums::approximants::{build_din, geometric_excess};
use weighted_sums::bounds::{bound_markov, MarkovBlock};
use weighted_sums::harness::config::ExperimentConfig;
use weighted_sums::harness::sweeps::run_markov;
use weighted_sums::markov::{cond1_check, mb_pmf, mb_simulate, MBParams};

pub fn main() -> weighted_sums::Result<()> {
    let params = MBParams::new(0.3, 0.02, 100)?;
    println!("cond1: {:?}", cond1_check(&params, 2, 1.0));

    let h = mb_pmf(&params);
    let (coeffs, d) = build_din(&params, 1e-10)?;
    println!("a1 = {}, a2 = {}, gamma = {}", coeffs.a1, coeffs.a2, coeffs.gamma);
    println!(
        "D: {} points, mass {:.15}, budget {:.1e}, most negative atom {:.3e}",
        d.len(),
        d.total_mass(),
        d.error_budget(),
        d.entries().map(|(_, m)| m).fold(0.0, f64::min)
    );
    let (hm, dm) = (h.moments(), d.moments());
    println!("mean   MB {:.12} D {:.12}", hm.mean, dm.mean);
    println!("var    MB {:.12} D {:.12}", hm.variance, dm.variance);
    println!("|H - D|_K = {:.6e}", (&h - &d).kolmogorov_norm());

    let y = geometric_excess(0.3, 0.7, 1e-12);
    println!("Y: mass {:.1e}, norm {:.12}", y.total_mass(), y.tv_norm());

    let empirical = mb_simulate(&params, 20_000, 7);
    println!("simulated vs exact |.|_K = {:.4}", (&empirical - &h).kolmogorov_norm());

    let report = bound_markov(&[MarkovBlock { params, weight: 1.0 }], 2);
    println!("bound factor {:.6}", report.factor);

    let sweep = run_markov(&ExperimentConfig::markov_default())?;
    for row in &sweep.rows {
        println!("n = {:4}: distance {:.6e}, ratio {:.4}", row.n, row.distance.unwrap(), row.ratio.unwrap());
    }
    Ok(())
}

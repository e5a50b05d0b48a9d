// Moment-matched negative binomial approximation of iid nonnegative sums.

use weighted_sums::approximants::{nb_char_fn, nb_component_pmf, nb_match};
use weighted_sums::bounds::{bound_nb, NbBlock};
use weighted_sums::harness::config::ExperimentConfig;
use weighted_sums::harness::sweeps::run_nb;
use weighted_sums::{CfOrder, LatticeMeasure};

pub fn main() -> weighted_sums::Result<()> {
    let f = LatticeMeasure::from_entries([(0, 0.375), (1, 0.5), (4, 0.125)]);
    let m = f.moments();
    let n = 10;
    let params = nb_match(n as f64 * m.mean, n as f64 * m.variance)?;
    println!("NB match for n = {n}: r = {}, p~ = {}", params.r, params.p_tilde);

    let component = nb_component_pmf(&params, n, 1e-10);
    let full = component.power(n);
    let fm = full.moments();
    println!(
        "component NB(r/n, p~): {} points, budget {:.1e}; n-fold power mean {}, variance {}",
        component.len(),
        component.error_budget(),
        fm.mean,
        fm.variance
    );
    let t = 1.0;
    println!(
        "transform at t = {t}: truncated {:.12}, closed form {:.12}",
        component.char_fn(t, 0.0, CfOrder::Value),
        nb_char_fn(&params, n, t)
    );

    let report = bound_nb(&[NbBlock { f: f.clone(), n, weight: 1.0 }])?;
    println!("bound factor {} with components {:?}", report.factor, report.components);

    let sweep = run_nb(&ExperimentConfig::nb_default())?;
    for row in &sweep.rows {
        println!("n = {:5}: distance {:.6e}, factor {:.6}", row.n, row.distance.unwrap(), row.factor.unwrap());
    }
    println!("factor slope {:.4}", sweep.factor_fit.unwrap().slope);
    Ok(())
}

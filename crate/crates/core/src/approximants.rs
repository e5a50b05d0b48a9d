//! Approximating measures: the moment-matched negative binomial, the
//! geometric excess measure `Y` and the signed compound-Poisson measure `D`
//! for Markov binomial sums.
//!
//! Infinite-support laws are truncated where a geometric bound on the
//! remaining tail, weighted by `1 + k + k^2`, falls below the requested
//! tolerance. That keeps the dropped mass and the dropped contributions to
//! the first two moments under the same tolerance. The dropped mass becomes
//! the measure's error budget.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::markov::MBParams;
use crate::measure::LatticeMeasure;

/// Shape `r` (real, positive) and success probability `p_tilde` of `NB(r, p_tilde)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegBinParams {
    pub r: f64,
    pub p_tilde: f64,
}

impl NegBinParams {
    pub fn new(r: f64, p_tilde: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid(format!("negative binomial shape must be positive, got {r}")));
        }
        if !(p_tilde > 0.0 && p_tilde < 1.0) {
            return Err(invalid(format!("p_tilde must lie in (0, 1), got {p_tilde}")));
        }
        Ok(Self { r, p_tilde })
    }

    pub fn q_tilde(&self) -> f64 {
        1.0 - self.p_tilde
    }

    pub fn mean(&self) -> f64 {
        self.r * self.q_tilde() / self.p_tilde
    }

    pub fn variance(&self) -> f64 {
        self.r * self.q_tilde() / (self.p_tilde * self.p_tilde)
    }
}

/// Negative binomial with the given mean and variance.
pub fn nb_match(mean: f64, variance: f64) -> Result<NegBinParams> {
    if !(mean > 0.0) {
        return Err(invalid(format!("mean must be positive, got {mean}")));
    }
    if !(variance > mean) {
        return Err(Error::Underdispersed { mean, variance });
    }
    NegBinParams::new(mean * mean / (variance - mean), mean / variance)
}

/// Transform of one of `n` iid components of `NB(r, p_tilde)`:
/// `(p_tilde / (1 - q_tilde e^{it}))^{r/n}`.
pub fn nb_char_fn(params: &NegBinParams, n: u64, t: f64) -> Complex64 {
    let base = Complex64::new(params.p_tilde, 0.0)
        / (Complex64::new(1.0, 0.0) - Complex64::from_polar(params.q_tilde(), t));
    (base.ln() * (params.r / n as f64)).exp()
}

/// `sum_{j>=1} R^j (1 + (K+j) + (K+j)^2)` for `0 <= R < 1`.
fn moment_weighted_geometric_sum(ratio: f64, cutoff: f64) -> f64 {
    let r = ratio;
    let s0 = r / (1.0 - r);
    let s1 = r / (1.0 - r).powi(2);
    let s2 = r * (1.0 + r) / (1.0 - r).powi(3);
    (1.0 + cutoff + cutoff * cutoff) * s0 + (1.0 + 2.0 * cutoff) * s1 + s2
}

/// Pmf of `NB(r/n, p_tilde)`, so that its `n`-fold power is `NB(r, p_tilde)`.
///
/// Probabilities follow the ratio recurrence
/// `P(k) / P(k-1) = q_tilde (r/n + k - 1) / k` in log space, starting from
/// `ln P(0) = (r/n) ln p_tilde`.
pub fn nb_component_pmf(params: &NegBinParams, n: u64, tail_tol: f64) -> LatticeMeasure {
    assert!(n >= 1 && tail_tol > 0.0);
    let shape = params.r / n as f64;
    let q = params.q_tilde();
    let ln_q = q.ln();
    let mut ln_p = shape * params.p_tilde.ln();
    let mut masses = Vec::new();
    let mut k = 0u64;
    loop {
        masses.push(ln_p.exp());
        // sup over j > k of P(j+1)/P(j) is at most max(current ratio, q)
        let ratio = (q * (shape + k as f64) / (k + 1) as f64).max(q);
        if ratio < 1.0 {
            let tail = ln_p.exp() * moment_weighted_geometric_sum(ratio, k as f64);
            if tail <= tail_tol {
                let mass_tail = ln_p.exp() * ratio / (1.0 - ratio);
                return LatticeMeasure::from_masses(0, masses).with_error_budget(mass_tail);
            }
        }
        ln_p += ln_q + ((shape + k as f64) / (k + 1) as f64).ln();
        k += 1;
    }
}

/// `q e^{it} / (1 - p e^{it}) - 1`.
pub fn geometric_excess_char_fn(p: f64, t: f64) -> Complex64 {
    let q = 1.0 - p;
    let e = Complex64::from_polar(1.0, t);
    q * e / (1.0 - p * e) - 1.0
}

/// `Y = Geom - delta_0` with `Y{k} = q p^{k-1}` for `k >= 1`, truncated.
pub fn geometric_excess(p: f64, q: f64, tail_tol: f64) -> LatticeMeasure {
    assert!(tail_tol > 0.0);
    geometric_excess_ln(p, q, tail_tol.ln())
}

fn geometric_excess_ln(p: f64, q: f64, ln_target: f64) -> LatticeMeasure {
    assert!((0.0..1.0).contains(&p), "p must lie in [0, 1)");
    assert!((p + q - 1.0).abs() < 1e-12, "q must equal 1 - p");
    let mut masses = vec![-1.0];
    if p == 0.0 {
        masses.push(1.0);
        return LatticeMeasure::from_masses(0, masses);
    }
    let ln_p = p.ln();
    let mut k = 1u64;
    loop {
        let ln_mass = q.ln() + (k - 1) as f64 * ln_p;
        masses.push(ln_mass.exp());
        let ln_tail = ln_mass + moment_weighted_geometric_sum(p, k as f64).ln();
        if ln_tail <= ln_target {
            // exact remaining mass sum_{j>k} q p^{j-1} = p^k
            let mass_tail = (k as f64 * ln_p).exp();
            return LatticeMeasure::from_masses(0, masses).with_error_budget(mass_tail);
        }
        k += 1;
    }
}

/// Coefficients of `D = exp{a1 Y - a2 Y^2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DinCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub gamma: f64,
}

pub fn din_coefficients(params: &MBParams) -> DinCoefficients {
    let MBParams { p, q, q_bar, n, .. } = *params;
    let n = n as f64;
    let gamma = params.gamma();
    let s = q + q_bar;
    let a1 = gamma * (q_bar - p) / s + n * gamma;
    let a2 = n * (q * q_bar * q_bar / (s * s) * (p + q / s) + gamma * gamma / 2.0);
    DinCoefficients { a1, a2, gamma }
}

/// Builds the signed compound-Poisson measure `D` on the unit lattice.
///
/// With `Y = G - delta_0` for the geometric law `G`, the argument is
/// `(a1 + 2 a2) G - a2 G^2 - (a1 + a2) delta_0`, so `||exp{s M}|| <= e^{s kappa}`
/// with `kappa = |a1 + 2 a2| + |a2| - (a1 + a2)`, also for truncated `G`.
/// That growth rate converts perturbations of the argument (truncating `Y`,
/// trimming `Y^2`) into total variation errors of `D`. A tenth of the
/// tolerance goes to truncating `Y` and a tenth to the exponential series.
/// The returned measure's error budget bounds its total variation distance
/// to the exact `D`.
pub fn build_din(params: &MBParams, tail_tol: f64) -> Result<(DinCoefficients, LatticeMeasure)> {
    if !(tail_tol > 0.0) {
        return Err(invalid("tail_tol must be positive"));
    }
    let coeffs = din_coefficients(params);
    let (a1, a2) = (coeffs.a1, coeffs.a2);
    let kappa = exp_growth(a1, a2);
    // ||Y|| <= 2: perturbing Y by e moves the argument by at most lip * e
    let lip = a1.abs() + 4.0 * a2.abs();
    let ln_target = (tail_tol / 10.0).ln() - (lip + 1.0).ln() - kappa;
    let y = geometric_excess_ln(params.p, params.q, ln_target);
    // the truncated tail mass is p^K with K the last kept point
    let cutoff = y.max_point().unwrap_or(1) as f64;
    let ln_y_budget = if params.p > 0.0 { cutoff * params.p.ln() } else { f64::NEG_INFINITY };
    let y = y.with_error_budget(0.0);
    let arg = &(&y * a1) - &(&y.convolve(&y) * a2);
    let trimmed = arg.error_budget();
    let (d, _) = arg.with_error_budget(0.0).exp_measure(tail_tol / 10.0);
    let truncation = (lip.ln() + ln_y_budget + kappa).exp();
    let trimming = trimmed * (kappa + trimmed).exp();
    let budget = d.error_budget() + truncation + trimming;
    Ok((coeffs, d.with_error_budget(budget)))
}

/// Exponential growth rate of `exp{s (a1 Y - a2 Y^2)}` in total variation.
fn exp_growth(a1: f64, a2: f64) -> f64 {
    (a1 + 2.0 * a2).abs() + a2.abs() - (a1 + a2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::mb_pmf;
    use crate::measure::CfOrder;

    #[test]
    fn nb_match_examples() {
        let p = nb_match(10.0, 15.0).unwrap();
        assert!((p.r - 20.0).abs() < 1e-12 && (p.p_tilde - 2.0 / 3.0).abs() < 1e-15);
        let p = nb_match(1.0, 2.0).unwrap();
        assert!((p.r - 1.0).abs() < 1e-15 && (p.p_tilde - 0.5).abs() < 1e-15);
        assert!(matches!(nb_match(1.0, 1.0), Err(Error::Underdispersed { .. })));
        assert!(matches!(nb_match(2.0, 1.0), Err(Error::Underdispersed { .. })));
    }

    #[test]
    fn nb_match_round_trip_closed_form() {
        for (m, v) in [(10.0, 15.0), (0.3, 0.31), (250.0, 4000.0)] {
            let p = nb_match(m, v).unwrap();
            assert!((p.mean() - m).abs() <= 1e-12 * m);
            assert!((p.variance() - v).abs() <= 1e-12 * v);
        }
    }

    #[test]
    fn geometric_component() {
        let params = NegBinParams::new(1.0, 0.5).unwrap();
        let g = nb_component_pmf(&params, 1, 1e-10);
        for k in 0..20 {
            assert!((g.get(k) - 0.5f64.powi(k as i32 + 1)).abs() < 1e-15);
        }
        assert!(g.error_budget() <= 1e-10);
    }

    #[test]
    fn component_power_recovers_moments() {
        let params = NegBinParams::new(20.0, 2.0 / 3.0).unwrap();
        let comp = nb_component_pmf(&params, 10, 1e-10);
        assert!((comp.get(0) - (2.0f64 / 3.0).powf(2.0)).abs() < 1e-15);
        let full = comp.power(10);
        let m = full.moments();
        assert!((m.mean - 10.0).abs() < 1e-8, "{}", m.mean);
        assert!((m.variance - 15.0).abs() < 1e-8, "{}", m.variance);
    }

    #[test]
    fn component_transform_matches_closed_form() {
        let params = NegBinParams::new(20.0, 2.0 / 3.0).unwrap();
        let tol = 1e-10;
        let comp = nb_component_pmf(&params, 10, tol);
        for j in 0..50 {
            let t = -std::f64::consts::PI + j as f64 * 0.128;
            let diff = comp.char_fn(t, 0.0, CfOrder::Value) - nb_char_fn(&params, 10, t);
            assert!(diff.norm() <= 10.0 * tol);
        }
    }

    #[test]
    fn excess_limits_and_norm() {
        let y = geometric_excess(0.0, 1.0, 1e-10);
        assert_eq!(y, &LatticeMeasure::delta(1) - &LatticeMeasure::delta(0));
        let y = geometric_excess(0.3, 0.7, 1e-10);
        assert!((y.tv_norm() - (2.0 - y.error_budget())).abs() < 1e-14);
        assert!(y.total_mass().abs() <= y.error_budget() + 1e-15);
    }

    #[test]
    fn excess_transform_and_bounds() {
        let tol = 1e-12;
        let y = geometric_excess(0.3, 0.7, tol);
        for j in 0..100 {
            let t = -std::f64::consts::PI + j as f64 * 2.0 * std::f64::consts::PI / 99.0;
            let v = y.char_fn(t, 0.0, CfOrder::Value);
            assert!((v - geometric_excess_char_fn(0.3, t)).norm() <= tol);
            let s = (t / 2.0).sin();
            assert!(v.norm() <= 4.0 * s.abs() + tol);
            assert!(v.re <= -4.0 / 3.0 * s * s + tol);
        }
    }

    #[test]
    fn excess_real_part_lower_form_fails_near_zero() {
        // Re Y(t) = -2(1+p) sin^2(t/2) / |1 - p e^{it}|^2 tends to -2(1+p)/(1-p)^2 sin^2
        let t: f64 = 0.1;
        let s2 = (t / 2.0).sin().powi(2);
        let v = geometric_excess_char_fn(0.3, t);
        let closed = -2.0 * 1.3 * s2 / (Complex64::new(1.0, 0.0) - 0.3 * Complex64::from_polar(1.0, t)).norm_sqr();
        assert!((v.re - closed).abs() < 1e-15);
        assert!(v.re < -4.0 / 3.0 * s2);
    }

    #[test]
    fn din_coefficients_reference_case() {
        let params = MBParams::new(0.3, 0.02, 100).unwrap();
        let c = din_coefficients(&params);
        // gamma = .7 * .02 / .72; a1 = gamma (.02 - .3)/.72 + 100 gamma
        assert!((c.gamma - 0.014 / 0.72).abs() < 1e-15);
        assert!((c.a1 - 1.936_882_716_049_382_7).abs() < 1e-12, "{}", c.a1);
        assert!((c.a2 - 0.087_620_027_434_842_25).abs() < 1e-12, "{}", c.a2);
        assert!(params.q_bar / 2.0 <= c.gamma && c.gamma <= params.q_bar);
    }

    #[test]
    fn growth_rate_bounds_exponential_norms() {
        let params = MBParams::new(0.3, 0.02, 1000).unwrap();
        let c = din_coefficients(&params);
        assert!((exp_growth(c.a1, c.a2) - 2.0 * c.a2).abs() < 1e-12);
        let y = geometric_excess(0.3, 0.7, 1e-14).with_error_budget(0.0);
        let arg = &(&y * c.a1) - &(&y.convolve(&y) * c.a2);
        for s in [0.25, 0.5, 1.0] {
            let (e, _) = (&arg * s).exp_measure(1e-12);
            assert!(e.tv_norm() <= (s * exp_growth(c.a1, c.a2)).exp() + 1e-9);
        }
    }

    #[test]
    fn din_budget_stays_small_for_long_chains() {
        for n in [400, 1000, 3000] {
            let (_, d) = build_din(&MBParams::new(0.3, 0.02, n).unwrap(), 1e-10).unwrap();
            assert!(d.error_budget() <= 1e-10, "{n} {}", d.error_budget());
            assert!((d.total_mass() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn din_mass_and_moments() {
        let tol = 1e-10;
        let params = MBParams::new(0.3, 0.02, 100).unwrap();
        let (_, d) = build_din(&params, tol).unwrap();
        assert!(d.error_budget() <= tol, "{}", d.error_budget());
        assert!((d.total_mass() - 1.0).abs() <= 10.0 * tol);
        let h = mb_pmf(&params).moments();
        let dm = d.moments();
        assert!((dm.mean - h.mean).abs() <= 10.0 * tol * (1.0 + h.mean), "{dm:?} {h:?}");
    }

    #[test]
    fn din_variance_closed_form_and_constant_gap() {
        let tol = 1e-10;
        let mut gaps = Vec::new();
        for n in [100, 200] {
            let params = MBParams::new(0.3, 0.02, n).unwrap();
            let (c, d) = build_din(&params, tol).unwrap();
            let q = params.q;
            let closed = c.a1 * (1.0 + params.p) / (q * q) - 2.0 * c.a2 / (q * q);
            let dm = d.moments();
            assert!((dm.variance - closed).abs() <= 10.0 * tol * (1.0 + closed));
            gaps.push(dm.variance - mb_pmf(&params).moments().variance);
        }
        // the variance is matched in its linear term only
        assert!((gaps[0] - gaps[1]).abs() < 1e-9, "{gaps:?}");
        assert!((gaps[0] - 0.027_365_778_844_687_94).abs() < 1e-8, "{gaps:?}");
    }
}

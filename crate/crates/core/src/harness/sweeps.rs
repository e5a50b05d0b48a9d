//! Sweeps over `n`: exact distances next to bound factors.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentKind};
use super::fit::{fit_rate, spread, RateFit};
use crate::approximants::{build_din, nb_component_pmf, nb_match};
use crate::bounds::{bound_iid, bound_markov, bound_nb, BlockSpec, BoundReport, MarkovBlock, NbBlock};
use crate::error::{invalid, Result};
use crate::markov::{mb_pmf, MBParams};
use crate::measure::{smoothness_u, LatticeMeasure, Side};
use crate::weighted::{lift, weighted_sum_distribution, Component, WeightBasis, WeightedMeasure};

/// One grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u64,
    /// Summand count of each block.
    pub counts: Vec<u64>,
    /// Exact Kolmogorov distance between the law and its approximant.
    pub distance: Option<f64>,
    /// Bound factor with the absolute constant set to 1.
    pub factor: Option<f64>,
    pub ratio: Option<f64>,
    /// Accumulated truncation error of the compared measures.
    pub error_budget: f64,
    pub components: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl SweepRow {
    fn new(n: u64, counts: Vec<u64>, distance: f64, report: Option<BoundReport>, error_budget: f64) -> Self {
        let (factor, components, warnings) = match report {
            Some(r) => (Some(r.factor), r.components, r.warnings),
            None => (None, BTreeMap::new(), Vec::new()),
        };
        Self {
            n,
            counts,
            distance: Some(distance),
            factor,
            ratio: factor.map(|f| distance / f),
            error_budget,
            components,
            warnings,
        }
    }
}

/// Fixed facts about the worked example, checked before any distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExamplePrerequisites {
    /// `nu_k+(F)` for `k = 1..=4`.
    pub nu_f: Vec<f64>,
    pub nu_g: Vec<f64>,
    pub beta4_plus: f64,
    pub u: f64,
    /// `nu_1 - nu_2 - nu_1^2`; Franken's condition needs it positive.
    pub franken: f64,
    pub verified: bool,
}

impl ExamplePrerequisites {
    pub fn compute(f: &LatticeMeasure, g: &LatticeMeasure, s: u32) -> Self {
        let nu = |m: &LatticeMeasure| (1..=4).map(|k| m.factorial_moment(k, Side::Plus)).collect::<Vec<_>>();
        let (nu_f, nu_g) = (nu(f), nu(g));
        let beta4_plus = nu_f[3] + nu_g[3];
        let u = smoothness_u(f, Some(g));
        let franken = nu_f[0] - nu_f[1] - nu_f[0] * nu_f[0];
        let matched = (0..s as usize).all(|k| nu_f[k] == nu_g[k]);
        Self {
            verified: matched && beta4_plus == 9.0 && u == 0.375 && franken == -1.5,
            nu_f,
            nu_g,
            beta4_plus,
            u,
            franken,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub kind: ExperimentKind,
    pub rows: Vec<SweepRow>,
    /// Fit of the measured distances against `n`.
    pub distance_fit: Option<RateFit>,
    /// Fit of the bound factors against `n`.
    pub factor_fit: Option<RateFit>,
    /// `max / min` of the distance-to-factor ratios.
    pub ratio_spread: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prerequisites: Option<ExamplePrerequisites>,
}

impl SweepResult {
    fn from_rows(kind: ExperimentKind, rows: Vec<SweepRow>) -> Self {
        let pts = |pick: fn(&SweepRow) -> Option<f64>| -> Vec<(f64, f64)> {
            rows.iter().filter_map(|r| pick(r).map(|v| (r.n as f64, v))).collect()
        };
        let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
        Self {
            kind,
            distance_fit: fit_rate(&pts(|r| r.distance)).ok(),
            factor_fit: fit_rate(&pts(|r| r.factor)).ok(),
            ratio_spread: (!ratios.is_empty()).then(|| spread(&ratios)),
            rows,
            prerequisites: None,
        }
    }
}

fn basis_of(weights: impl Iterator<Item = f64>) -> Result<WeightBasis> {
    WeightBasis::new(weights.collect())
}

/// Iid blocks: exact `L(sum w_i S_i)` against `L(sum w_i Z_i)`.
pub fn run_iid(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let s = config.s.unwrap_or(1);
    let basis = basis_of(config.blocks.iter().map(|b| b.weight))?;
    let rows = config
        .n_grid
        .par_iter()
        .map(|&n| {
            let counts: Vec<u64> = config.blocks.iter().map(|b| b.count.count(n)).collect();
            let mut law_s = Vec::new();
            let mut law_z = Vec::new();
            let mut specs = Vec::new();
            for (i, (b, &count)) in config.blocks.iter().zip(&counts).enumerate() {
                let g = b.g.clone().ok_or_else(|| invalid("block without g"))?;
                law_s.push(Component { measure: b.f.clone(), count, index: i });
                law_z.push(Component { measure: g.clone(), count, index: i });
                specs.push(BlockSpec::iid(b.f.clone(), g, count, b.weight));
            }
            let ls = weighted_sum_distribution(&law_s, &basis)?;
            let lz = weighted_sum_distribution(&law_z, &basis)?;
            let distance = ls.wkolmogorov_distance(&lz)?;
            let report = bound_iid(&specs, s)?;
            let budget = ls.error_budget() + lz.error_budget();
            Ok(SweepRow::new(n, counts, distance, Some(report), budget))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_rows(config.kind, rows))
}

/// The worked example on `n_grid`: prerequisites first, then the sweep.
pub fn run_example(n_grid: &[u64]) -> Result<SweepResult> {
    let mut config = ExperimentConfig::example();
    config.n_grid = n_grid.to_vec();
    run_example_config(&config)
}

/// [`run_example`] with explicit blocks; prerequisites use the first block.
pub fn run_example_config(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let first = &config.blocks[0];
    let g = first.g.as_ref().ok_or_else(|| invalid("block without g"))?;
    let prerequisites = ExamplePrerequisites::compute(&first.f, g, config.s.unwrap_or(3));
    let mut result = run_iid(config)?;
    result.prerequisites = Some(prerequisites);
    Ok(result)
}

fn product(parts: Vec<WeightedMeasure>, basis: &WeightBasis) -> Result<WeightedMeasure> {
    parts
        .iter()
        .try_fold(WeightedMeasure::identity(basis), |acc, m| acc.wconvolve(m))
}

/// Markov binomial blocks against the signed compound-Poisson measures `D`.
pub fn run_markov(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let basis = basis_of(config.markov.iter().map(|b| b.weight))?;
    let rows = config
        .n_grid
        .par_iter()
        .map(|&n| {
            let counts: Vec<u64> = config.markov.iter().map(|b| b.count.count(n)).collect();
            let mut h = Vec::new();
            let mut d = Vec::new();
            let mut blocks = Vec::new();
            let mut coefficients = Vec::new();
            for (i, (b, &count)) in config.markov.iter().zip(&counts).enumerate() {
                let params = MBParams::new(b.p, b.q_bar, count)?;
                let (c, din) = build_din(&params, config.tail_tol)?;
                h.push(lift(&mb_pmf(&params), i, &basis)?);
                d.push(lift(&din, i, &basis)?);
                blocks.push(MarkovBlock { params, weight: b.weight });
                coefficients.push(c);
            }
            let h = product(h, &basis)?;
            let d = product(d, &basis)?;
            let distance = h.wkolmogorov_distance(&d)?;
            let mut report = bound_markov(&blocks, config.k0);
            for (i, c) in coefficients.iter().enumerate() {
                report.components.insert(format!("a1[{i}]"), c.a1);
                report.components.insert(format!("a2[{i}]"), c.a2);
            }
            let budget = h.error_budget() + d.error_budget();
            Ok(SweepRow::new(n, counts, distance, Some(report), budget))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_rows(ExperimentKind::MarkovSweep, rows))
}

/// Iid nonnegative blocks against moment-matched negative binomials.
pub fn run_nb(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let basis = basis_of(config.blocks.iter().map(|b| b.weight))?;
    let rows = config
        .n_grid
        .par_iter()
        .map(|&n| {
            let counts: Vec<u64> = config.blocks.iter().map(|b| b.count.count(n)).collect();
            let mut law = Vec::new();
            let mut approx = Vec::new();
            let mut blocks = Vec::new();
            for (i, (b, &count)) in config.blocks.iter().zip(&counts).enumerate() {
                let m = b.f.moments();
                let params = nb_match(count as f64 * m.mean, count as f64 * m.variance)?;
                law.push(lift(&b.f.power(count), i, &basis)?);
                approx.push(lift(&nb_component_pmf(&params, 1, config.tail_tol), i, &basis)?);
                blocks.push(NbBlock { f: b.f.clone(), n: count, weight: b.weight });
            }
            let law = product(law, &basis)?;
            let approx = product(approx, &basis)?;
            let distance = law.wkolmogorov_distance(&approx)?;
            let report = bound_nb(&blocks)?;
            let budget = law.error_budget() + approx.error_budget();
            Ok(SweepRow::new(n, counts, distance, Some(report), budget))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult::from_rows(ExperimentKind::NbSweep, rows))
}

/// `Poisson(n) * Bernoulli(1/3)` against `Poisson(n) * Bernoulli(1/4)`.
pub fn demo_intro(n_grid: &[u64], tail_tol: f64) -> Result<SweepResult> {
    let rows = n_grid
        .par_iter()
        .map(|&n| {
            let step = &LatticeMeasure::delta(1) - &LatticeMeasure::delta(0);
            let (poisson, _) = (&step * n as f64).exp_measure(tail_tol);
            let s = poisson.convolve(&LatticeMeasure::bernoulli(1.0 / 3.0));
            let z = poisson.convolve(&LatticeMeasure::bernoulli(0.25));
            let distance = (&s - &z).kolmogorov_norm();
            SweepRow::new(n, vec![n], distance, None, s.error_budget() + z.error_budget())
        })
        .collect();
    Ok(SweepResult::from_rows(ExperimentKind::DemoIntro, rows))
}

/// Dispatches on the config kind (everything except `check`).
pub fn run_config(config: &ExperimentConfig) -> Result<SweepResult> {
    match config.kind {
        ExperimentKind::Example => run_example_config(config),
        ExperimentKind::IidSweep => run_iid(config),
        ExperimentKind::MarkovSweep => run_markov(config),
        ExperimentKind::NbSweep => run_nb(config),
        ExperimentKind::DemoIntro => {
            config.validate()?;
            demo_intro(&config.n_grid, config.tail_tol)
        }
        ExperimentKind::Check => Err(invalid("check configs are run by the inequality suite")),
    }
}

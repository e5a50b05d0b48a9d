//! Markov binomial sums: the number of ones in `n` steps of a two-state
//! chain started in state 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::measure::LatticeMeasure;

/// Transition parameters of the chain.
///
/// `p = P(1 -> 1)`, `q = P(1 -> 0)`, `q_bar = P(0 -> 1)`, `p_bar = P(0 -> 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MBParams {
    pub p: f64,
    pub q: f64,
    pub q_bar: f64,
    pub p_bar: f64,
    pub n: u64,
}

impl MBParams {
    pub fn new(p: f64, q_bar: f64, n: u64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!("p must lie in (0, 1), got {p}")));
        }
        if !(q_bar > 0.0 && q_bar < 1.0) {
            return Err(invalid(format!("q_bar must lie in (0, 1), got {q_bar}")));
        }
        if n == 0 {
            return Err(invalid("the horizon n must be at least 1"));
        }
        Ok(Self {
            p,
            q: 1.0 - p,
            q_bar,
            p_bar: 1.0 - q_bar,
            n,
        })
    }

    pub fn with_n(self, n: u64) -> Result<Self> {
        Self::new(self.p, self.q_bar, n)
    }

    /// `q q_bar / (q + q_bar)`.
    pub fn gamma(&self) -> f64 {
        self.q * self.q_bar / (self.q + self.q_bar)
    }
}

#[derive(Deserialize)]
struct MBParamsRepr {
    p: f64,
    q_bar: f64,
    n: u64,
}

impl<'de> Deserialize<'de> for MBParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MBParamsRepr::deserialize(d)?;
        MBParams::new(r.p, r.q_bar, r.n).map_err(serde::de::Error::custom)
    }
}

/// Clauses of the small-`q_bar` regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cond1Clause {
    /// `q_bar >= n^{-k0}`
    QBarNotTooSmall,
    /// `0 < p <= 1/2`
    PAtMostHalf,
    /// `q_bar <= 1/30`
    QBarAtMostOneThirtieth,
    /// `w > 0`
    PositiveWeight,
    /// `n >= 1`
    PositiveHorizon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cond1Report {
    pub satisfied: bool,
    pub violated_clauses: Vec<Cond1Clause>,
}

/// Evaluates every clause; never fails.
pub fn cond1_check(params: &MBParams, k0: u32, w: f64) -> Cond1Report {
    let mut violated = Vec::new();
    let floor = (params.n as f64).powf(-(k0 as f64));
    if params.q_bar < floor {
        violated.push(Cond1Clause::QBarNotTooSmall);
    }
    if !(params.p > 0.0 && params.p <= 0.5) {
        violated.push(Cond1Clause::PAtMostHalf);
    }
    if params.q_bar > 1.0 / 30.0 {
        violated.push(Cond1Clause::QBarAtMostOneThirtieth);
    }
    if !(w > 0.0) {
        violated.push(Cond1Clause::PositiveWeight);
    }
    if params.n < 1 {
        violated.push(Cond1Clause::PositiveHorizon);
    }
    Cond1Report {
        satisfied: violated.is_empty(),
        violated_clauses: violated,
    }
}

/// Exact law of `S = xi_1 + ... + xi_n` by dynamic programming over
/// `(count, current state)`.
pub fn mb_pmf(params: &MBParams) -> LatticeMeasure {
    let n = params.n as usize;
    // in_zero[k] / in_one[k]: P(count = k, current state = 0 / 1)
    let mut in_zero = vec![0.0; n + 1];
    let mut in_one = vec![0.0; n + 1];
    in_zero[0] = 1.0;
    for step in 0..n {
        let mut next_zero = vec![0.0; n + 1];
        let mut next_one = vec![0.0; n + 1];
        for k in 0..=step {
            let (z, o) = (in_zero[k], in_one[k]);
            next_zero[k] += z * params.p_bar + o * params.q;
            next_one[k + 1] += z * params.q_bar + o * params.p;
        }
        in_zero = next_zero;
        in_one = next_one;
    }
    let masses = in_zero.iter().zip(&in_one).map(|(a, b)| a + b).collect();
    LatticeMeasure::from_masses(0, masses)
}

/// Empirical law of `trials` simulated chains; deterministic in `seed`.
pub fn mb_simulate(params: &MBParams, trials: u64, seed: u64) -> LatticeMeasure {
    assert!(trials >= 1, "need at least one trial");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; params.n as usize + 1];
    for _ in 0..trials {
        let mut state = false;
        let mut ones = 0usize;
        for _ in 0..params.n {
            let u: f64 = rng.random();
            state = if state { u < params.p } else { u < params.q_bar };
            ones += state as usize;
        }
        counts[ones] += 1;
    }
    let masses = counts.iter().map(|c| *c as f64 / trials as f64).collect();
    LatticeMeasure::from_masses(0, masses)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
        let mut out = vec![0.0; n as usize + 1];
        let mut c = 1.0;
        for k in 0..=n {
            out[k as usize] = c * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
            c = c * (n - k) as f64 / (k + 1) as f64;
        }
        out
    }

    #[test]
    fn one_step() {
        let m = mb_pmf(&MBParams::new(0.3, 0.02, 1).unwrap());
        assert!((m.get(0) - 0.98).abs() < 1e-15);
        assert!((m.get(1) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn two_steps_by_paths() {
        let m = mb_pmf(&MBParams::new(0.3, 0.02, 2).unwrap());
        // 00: .98^2, 01 + 10: .98*.02 + .02*.7, 11: .02*.3
        assert!((m.get(0) - 0.9604).abs() < 1e-15);
        assert!((m.get(1) - 0.0336).abs() < 1e-15);
        assert!((m.get(2) - 0.006).abs() < 1e-15);
    }

    #[test]
    fn independent_chain_is_binomial() {
        // q_bar = p makes every step an independent Bernoulli(p)
        let params = MBParams::new(0.4, 0.4, 15).unwrap();
        let m = mb_pmf(&params);
        for (k, want) in binomial_pmf(15, 0.4).into_iter().enumerate() {
            assert!((m.get(k as i64) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(MBParams::new(0.0, 0.1, 3).is_err());
        assert!(MBParams::new(0.3, 1.0, 3).is_err());
        assert!(MBParams::new(0.3, 0.1, 0).is_err());
    }

    #[test]
    fn cond1_examples() {
        let base = MBParams::new(0.3, 0.02, 100).unwrap();
        assert!(cond1_check(&base, 2, 1.0).satisfied);
        let r = cond1_check(&MBParams::new(0.6, 0.02, 100).unwrap(), 2, 1.0);
        assert_eq!(r.violated_clauses, vec![Cond1Clause::PAtMostHalf]);
        let r = cond1_check(&MBParams::new(0.3, 0.05, 100).unwrap(), 2, 1.0);
        assert_eq!(r.violated_clauses, vec![Cond1Clause::QBarAtMostOneThirtieth]);
        let r = cond1_check(&MBParams::new(0.3, 1e-5, 100).unwrap(), 2, -1.0);
        assert_eq!(
            r.violated_clauses,
            vec![Cond1Clause::QBarNotTooSmall, Cond1Clause::PositiveWeight]
        );
    }

    #[test]
    fn simulation_is_seeded() {
        let params = MBParams::new(0.3, 0.02, 5).unwrap();
        assert_eq!(mb_simulate(&params, 1000, 7), mb_simulate(&params, 1000, 7));
    }

    #[test]
    fn simulation_one_step_frequencies() {
        let params = MBParams::new(0.3, 0.2, 1).unwrap();
        let e = mb_simulate(&params, 100_000, 3);
        assert!((e.get(1) - 0.2).abs() < 5.0 * (0.2f64 * 0.8 / 1e5).sqrt());
    }
}

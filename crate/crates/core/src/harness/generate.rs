//! Seeded random instances for the inequality suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::measure::{falling_factorial, LatticeMeasure};

/// Bound of the random supports, `[-SUPPORT_RADIUS, SUPPORT_RADIUS]`.
pub const SUPPORT_RADIUS: i64 = 8;

/// Upper end of the matched-pair support `{0, ..., MATCHED_TOP}`.
pub const MATCHED_TOP: i64 = 8;

pub const MAX_ATTEMPTS: u32 = 1000;

/// Generator for one independent stream of a master seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_interval<R: Rng>(rng: &mut R) -> (i64, i64) {
    let a = rng.random_range(-SUPPORT_RADIUS..=SUPPORT_RADIUS);
    let b = rng.random_range(-SUPPORT_RADIUS..=SUPPORT_RADIUS);
    (a.min(b), a.max(b))
}

/// Probability distribution on a random subinterval of `[-8, 8]` with
/// exponential weights normalized to one (a flat Dirichlet draw).
pub fn random_distribution<R: Rng>(rng: &mut R) -> LatticeMeasure {
    let (lo, hi) = random_interval(rng);
    let raw: Vec<f64> = (lo..=hi).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    LatticeMeasure::from_masses(lo, raw.into_iter().map(|x| x / total).collect())
}

/// Signed measure on a random subinterval of `[-8, 8]`, masses uniform in `[-1, 1]`.
pub fn random_signed<R: Rng>(rng: &mut R) -> LatticeMeasure {
    let (lo, hi) = random_interval(rng);
    LatticeMeasure::from_masses(lo, (lo..=hi).map(|_| rng.random_range(-1.0..=1.0)).collect())
}

/// Rows `k! binom(m, k)` for `k = 0..=s`, `m = 0..=MATCHED_TOP`, orthonormalized.
fn moment_row_basis(s: u32) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for k in 0..=s {
        let mut row: Vec<f64> = (0..=MATCHED_TOP).map(|m| falling_factorial(m, k)).collect();
        // two Gram-Schmidt passes for a clean null space
        for _ in 0..2 {
            for e in &basis {
                let dot: f64 = row.iter().zip(e).map(|(a, b)| a * b).sum();
                row.iter_mut().zip(e).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let norm = row.iter().map(|a| a * a).sum::<f64>().sqrt();
        basis.push(row.into_iter().map(|a| a / norm).collect());
    }
    basis
}

/// Random pair on `{0, ..., 8}` with `nu_k+` equal for `k <= s`.
///
/// `F` is a flat Dirichlet draw and `G = F + d` with `d` a random direction
/// in the null space of the moment system, scaled at random. Draws with a
/// negative mass in `G` are rejected.
pub fn matched_pair<R: Rng>(rng: &mut R, s: u32) -> Result<(LatticeMeasure, LatticeMeasure)> {
    if !(1..=3).contains(&s) {
        return Err(invalid(format!("matched pairs are generated for s in 1..=3, got {s}")));
    }
    let rows = moment_row_basis(s);
    let len = (MATCHED_TOP + 1) as usize;
    for _ in 0..MAX_ATTEMPTS {
        let raw: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = raw.iter().sum();
        let f: Vec<f64> = raw.into_iter().map(|x| x / total).collect();

        let mut d: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        for _ in 0..2 {
            for e in &rows {
                let dot: f64 = d.iter().zip(e).map(|(a, b)| a * b).sum();
                d.iter_mut().zip(e).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let peak = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let scale = rng.random_range(0.01..0.2) / peak;
        let g: Vec<f64> = f.iter().zip(&d).map(|(a, b)| a + scale * b).collect();
        if g.iter().all(|x| *x >= 0.0) {
            return Ok((LatticeMeasure::from_masses(0, f), LatticeMeasure::from_masses(0, g)));
        }
    }
    Err(Error::RetryExhausted(MAX_ATTEMPTS))
}

/// [`matched_pair`] driven by its own seed.
pub fn gen_matched_pair(seed: u64, s: u32) -> Result<(LatticeMeasure, LatticeMeasure)> {
    matched_pair(&mut ChaCha8Rng::seed_from_u64(seed), s)
}

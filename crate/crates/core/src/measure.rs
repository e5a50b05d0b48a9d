//! Finite signed measures on the integer lattice.
//!
//! A [`LatticeMeasure`] stores its masses densely from the smallest to the
//! largest support point. Zero masses inside that range are simply absent
//! atoms. After every operation, masses smaller than `1e-16` times the total
//! variation are dropped and the dropped mass is added to an error budget
//! that travels with the measure, so truncation stays accountable through
//! long convolution chains.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Masses below this fraction of the total variation are trimmed.
pub const TRIM_RELATIVE: f64 = 1e-16;

/// Tolerance on total mass when deciding whether a measure is a probability law.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Which tail a factorial moment is taken over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn symbol(self) -> char {
        match self {
            Side::Plus => '+',
            Side::Minus => '-',
        }
    }
}

/// Order of the Fourier-Stieltjes transform evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfOrder {
    /// `e^{-it c} M^(t)`
    Value,
    /// The analytic `t`-derivative of the value.
    Derivative,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
}

#[derive(Clone, PartialEq)]
pub struct LatticeMeasure {
    /// Lattice point carrying `masses[0]`.
    offset: i64,
    masses: Vec<f64>,
    error_budget: f64,
}

impl fmt::Debug for LatticeMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries()).finish()?;
        if self.error_budget > 0.0 {
            write!(f, " (budget {:e})", self.error_budget)?;
        }
        Ok(())
    }
}

impl Default for LatticeMeasure {
    fn default() -> Self {
        Self::zero()
    }
}

impl LatticeMeasure {
    pub fn zero() -> Self {
        Self {
            offset: 0,
            masses: Vec::new(),
            error_budget: 0.0,
        }
    }

    /// Unit point mass at `a`.
    pub fn delta(a: i64) -> Self {
        Self {
            offset: a,
            masses: vec![1.0],
            error_budget: 0.0,
        }
    }

    /// Measure with `masses[j]` placed at `offset + j`.
    pub fn from_masses(offset: i64, masses: Vec<f64>) -> Self {
        let mut m = Self {
            offset,
            masses,
            error_budget: 0.0,
        };
        m.normalize();
        m
    }

    /// Builds a measure from `(point, mass)` pairs; repeated points add up.
    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (i64, f64)>,
    {
        let entries: Vec<(i64, f64)> = entries.into_iter().collect();
        let Some(lo) = entries.iter().map(|e| e.0).min() else {
            return Self::zero();
        };
        let hi = entries.iter().map(|e| e.0).max().unwrap();
        let mut masses = vec![0.0; (hi - lo + 1) as usize];
        for (k, m) in entries {
            masses[(k - lo) as usize] += m;
        }
        Self::from_masses(lo, masses)
    }

    /// Bernoulli law on `{0, 1}` with success probability `p`.
    pub fn bernoulli(p: f64) -> Self {
        Self::from_masses(0, vec![1.0 - p, p])
    }

    /// Accumulated bound on the total variation distance to the exact measure
    /// this value approximates.
    pub fn error_budget(&self) -> f64 {
        self.error_budget
    }

    pub fn with_error_budget(mut self, budget: f64) -> Self {
        self.error_budget = budget;
        self
    }


    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Number of atoms with nonzero mass.
    pub fn len(&self) -> usize {
        self.masses.iter().filter(|m| **m != 0.0).count()
    }

    pub fn min_point(&self) -> Option<i64> {
        (!self.masses.is_empty()).then_some(self.offset)
    }

    pub fn max_point(&self) -> Option<i64> {
        (!self.masses.is_empty()).then(|| self.offset + self.masses.len() as i64 - 1)
    }

    /// Mass at a single lattice point.
    pub fn get(&self, k: i64) -> f64 {
        let j = k - self.offset;
        if j < 0 || j >= self.masses.len() as i64 {
            0.0
        } else {
            self.masses[j as usize]
        }
    }

    /// Nonzero atoms in increasing order of position.
    pub fn entries(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, m)| **m != 0.0)
            .map(move |(j, m)| (self.offset + j as i64, *m))
    }

    /// Dense view: `(offset, masses)` with `masses[j]` at `offset + j`.
    pub fn dense(&self) -> (i64, &[f64]) {
        (self.offset, &self.masses)
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Total variation norm `sum |M{k}|`.
    pub fn tv_norm(&self) -> f64 {
        self.masses.iter().map(|m| m.abs()).sum()
    }

    /// `sup_x |M((-inf, x])|`, attained at support points.
    pub fn kolmogorov_norm(&self) -> f64 {
        let mut acc = 0.0f64;
        let mut best = 0.0f64;
        for m in &self.masses {
            acc += m;
            best = best.max(acc.abs());
        }
        best
    }

    pub fn is_probability(&self) -> bool {
        self.masses.iter().all(|m| *m >= 0.0)
            && (self.total_mass() - 1.0).abs() <= PROBABILITY_TOLERANCE
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = Self {
            offset: self.offset,
            masses: self.masses.iter().map(|m| m * c).collect(),
            error_budget: self.error_budget * c.abs(),
        };
        out.normalize();
        out
    }

    /// Translation by `k` lattice steps (convolution with `delta(k)`).
    pub fn shift(&self, k: i64) -> Self {
        Self {
            offset: self.offset + k,
            ..self.clone()
        }
    }

    pub fn convolve(&self, other: &Self) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self {
                error_budget: self.error_budget * other.tv_norm()
                    + other.error_budget * self.tv_norm()
                    + self.error_budget * other.error_budget,
                ..Self::zero()
            };
        }
        let (a, b) = if self.masses.len() >= other.masses.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = vec![0.0; a.masses.len() + b.masses.len() - 1];
        for (j, &bj) in b.masses.iter().enumerate() {
            if bj == 0.0 {
                continue;
            }
            for (o, &ai) in out[j..j + a.masses.len()].iter_mut().zip(&a.masses) {
                *o += ai * bj;
            }
        }
        let budget = self.error_budget * other.tv_norm()
            + other.error_budget * self.tv_norm()
            + self.error_budget * other.error_budget;
        let mut m = Self {
            offset: a.offset + b.offset,
            masses: out,
            error_budget: budget,
        };
        m.normalize();
        m
    }

    /// `n`-fold convolution power by binary exponentiation; `power(0)` is `delta(0)`.
    pub fn power(&self, mut n: u64) -> Self {
        let mut result = Self::delta(0);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.convolve(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.convolve(&base);
            }
        }
        result
    }

    /// Truncated exponential `sum_k M^k / k!`.
    ///
    /// The argument is scaled by `2^-j` until its norm is at most 1/2, the
    /// series is cut where the factorial tail bound drops below the target,
    /// and the result is squared `j` times. Returns the measure together with
    /// the realized bound on its total variation distance to `exp{M}`
    /// (series truncation and trimming, propagated through the squarings).
    /// Any error budget already carried by `M` is propagated into the
    /// returned measure's budget but not into the realized bound.
    pub fn exp_measure(&self, tail_tol: f64) -> (Self, f64) {
        assert!(tail_tol > 0.0, "tail_tol must be positive");
        let norm = self.tv_norm();
        let halvings = if norm <= 0.5 {
            0
        } else {
            (norm / 0.5).log2().ceil() as u32
        };
        let scaled = Self {
            error_budget: 0.0,
            ..self.scale(0.5f64.powi(halvings as i32))
        };
        let x = scaled.tv_norm();

        let mut target = tail_tol / 4f64.powi(halvings as i32);
        let mut attempt = 0;
        let (result, realized) = loop {
            let cutoff = exp_series_cutoff(x, target);
            let mut sum = Self::delta(0);
            let mut term = Self::delta(0);
            for k in 1..=cutoff {
                term = term.convolve(&scaled).scale(1.0 / k as f64);
                sum = &sum + &term;
            }
            sum.error_budget += exp_series_tail(x, cutoff);
            for _ in 0..halvings {
                sum = sum.convolve(&sum);
            }
            let realized = sum.error_budget;
            attempt += 1;
            if realized <= tail_tol || attempt >= 8 {
                break (sum, realized);
            }
            target *= 0.5 * tail_tol / realized;
        };

        let inherited = self.error_budget;
        let mut result = result;
        if inherited > 0.0 {
            result.error_budget += inherited * (norm + inherited).exp();
        }
        (result, realized)
    }

    /// Evaluates `e^{-it c} sum_k e^{itk} M{k}` or its `t`-derivative.
    pub fn char_fn(&self, t: f64, center: f64, order: CfOrder) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, m) in self.entries() {
            let x = k as f64 - center;
            let e = Complex64::from_polar(m, t * x);
            acc += match order {
                CfOrder::Value => e,
                CfOrder::Derivative => Complex64::new(0.0, x) * e,
            };
        }
        acc
    }

    /// Right-hand (`Plus`) or left-hand (`Minus`) factorial moment of order `k`.
    pub fn factorial_moment(&self, k: u32, side: Side) -> f64 {
        self.entries()
            .filter_map(|(point, mass)| {
                let m = match side {
                    Side::Plus => point,
                    Side::Minus => -point,
                };
                (m >= k as i64).then(|| falling_factorial(m, k) * mass)
            })
            .sum()
    }

    /// `1 - ||M (delta_1 - delta_0)|| / 2`.
    pub fn smoothness_via_norm(&self) -> f64 {
        let shifted = self.shift(1) - self.clone();
        1.0 - 0.5 * shifted.tv_norm()
    }

    /// `sum_k min(M{k}, M{k-1})`.
    pub fn smoothness_via_overlap(&self) -> f64 {
        let Some(lo) = self.min_point() else {
            return 0.0;
        };
        let hi = self.max_point().unwrap();
        (lo..=hi + 1)
            .map(|k| self.get(k).min(self.get(k - 1)))
            .sum()
    }

    /// Levy concentration `sup_x M{[x, x + h]}` over closed windows.
    pub fn concentration(&self, h: f64) -> f64 {
        assert!(h >= 0.0, "window length must be nonnegative");
        if self.masses.is_empty() {
            return 0.0;
        }
        let width = (h.floor() as usize).saturating_add(1).min(self.masses.len());
        let mut window: f64 = self.masses[..width].iter().sum();
        let mut best = window;
        for j in width..self.masses.len() {
            window += self.masses[j] - self.masses[j - width];
            best = best.max(window);
        }
        best
    }

    pub fn moments(&self) -> MomentSummary {
        let total = self.total_mass();
        let mean = self.entries().map(|(k, m)| k as f64 * m).sum::<f64>() / total;
        let variance = self
            .entries()
            .map(|(k, m)| (k as f64 - mean).powi(2) * m)
            .sum::<f64>()
            / total;
        MomentSummary { mean, variance }
    }

    fn normalize(&mut self) {
        let threshold = TRIM_RELATIVE * self.tv_norm();
        let mut trimmed = 0.0;
        for m in &mut self.masses {
            if *m != 0.0 && m.abs() < threshold {
                trimmed += m.abs();
                *m = 0.0;
            }
        }
        self.error_budget += trimmed;
        let first = self.masses.iter().position(|m| *m != 0.0);
        match first {
            None => {
                self.masses.clear();
                self.offset = 0;
            }
            Some(first) => {
                let last = self.masses.iter().rposition(|m| *m != 0.0).unwrap();
                self.masses.truncate(last + 1);
                self.masses.drain(..first);
                self.offset += first as i64;
            }
        }
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        if self.is_empty() {
            return other.scale(sign);
        }
        if other.is_empty() {
            return self.clone().with_error_budget(self.error_budget + other.error_budget);
        }
        let lo = self.offset.min(other.offset);
        let hi = self.max_point().unwrap().max(other.max_point().unwrap());
        let mut masses = vec![0.0; (hi - lo + 1) as usize];
        for (j, m) in self.masses.iter().enumerate() {
            masses[(self.offset - lo) as usize + j] += m;
        }
        for (j, m) in other.masses.iter().enumerate() {
            masses[(other.offset - lo) as usize + j] += sign * m;
        }
        let mut out = Self {
            offset: lo,
            masses,
            error_budget: self.error_budget + other.error_budget,
        };
        out.normalize();
        out
    }
}

/// `m (m-1) ... (m-k+1)`.
pub fn falling_factorial(m: i64, k: u32) -> f64 {
    (0..k as i64).map(|j| (m - j) as f64).product()
}

/// `x^{K+1}/(K+1)! / (1 - x/(K+2))`, an upper bound on `sum_{k>K} x^k/k!`.
fn exp_series_tail(x: f64, cutoff: usize) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let k1 = cutoff as f64 + 1.0;
    let mut lead = 1.0;
    for j in 1..=cutoff + 1 {
        lead *= x / j as f64;
    }
    let ratio = x / (k1 + 1.0);
    if ratio >= 1.0 {
        f64::INFINITY
    } else {
        lead / (1.0 - ratio)
    }
}

fn exp_series_cutoff(x: f64, target: f64) -> usize {
    let mut k = 0;
    while exp_series_tail(x, k) > target {
        k += 1;
    }
    k
}

/// Smoothness `u`: the single-measure value, or the smaller of the two
/// when a partner measure is given.
pub fn smoothness_u(f: &LatticeMeasure, g: Option<&LatticeMeasure>) -> f64 {
    let uf = f.smoothness_via_overlap();
    match g {
        Some(g) => uf.min(g.smoothness_via_overlap()),
        None => uf,
    }
}

impl Add for &LatticeMeasure {
    type Output = LatticeMeasure;
    fn add(self, rhs: &LatticeMeasure) -> LatticeMeasure {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &LatticeMeasure {
    type Output = LatticeMeasure;
    fn sub(self, rhs: &LatticeMeasure) -> LatticeMeasure {
        self.combine(rhs, -1.0)
    }
}

impl Add for LatticeMeasure {
    type Output = LatticeMeasure;
    fn add(self, rhs: LatticeMeasure) -> LatticeMeasure {
        self.combine(&rhs, 1.0)
    }
}

impl Sub for LatticeMeasure {
    type Output = LatticeMeasure;
    fn sub(self, rhs: LatticeMeasure) -> LatticeMeasure {
        self.combine(&rhs, -1.0)
    }
}

impl Neg for &LatticeMeasure {
    type Output = LatticeMeasure;
    fn neg(self) -> LatticeMeasure {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &LatticeMeasure {
    type Output = LatticeMeasure;
    fn mul(self, c: f64) -> LatticeMeasure {
        self.scale(c)
    }
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    entries: Vec<(i64, f64)>,
}

impl Serialize for LatticeMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MeasureRepr {
            entries: self.entries().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticeMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = MeasureRepr::deserialize(d)?;
        Ok(Self::from_entries(repr.entries))
    }
}

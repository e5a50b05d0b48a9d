//! Measures on `w_1 Z + ... + w_N Z` for a fixed basis of positive weights.
//!
//! Atoms are keyed by their integer coefficient vectors, so convolution is
//! exact even when weights are incommensurable. Real positions are only
//! computed when a CDF or a window is needed, and atoms whose real positions
//! agree within `1e-9 (1 + max |value|)` are merged at that point.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::measure::{LatticeMeasure, PROBABILITY_TOLERANCE};

/// Relative tolerance for treating two real support positions as one.
pub const MERGE_RELATIVE: f64 = 1e-9;

/// Largest number of atoms any weighted operation will materialize.
pub const MAX_SUPPORT: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightBasis {
    weights: Vec<f64>,
}

impl WeightBasis {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("a weight basis needs at least one weight"));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(invalid(format!("weights must be positive and finite, got {w}")));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `max_j w_j / min_j w_j`.
    pub fn ratio(&self) -> f64 {
        weight_ratio(&self.weights)
    }

    /// Real position `sum_i c_i w_i`.
    pub fn value(&self, coeffs: &[i64]) -> f64 {
        coeffs
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| *c as f64 * w)
            .sum()
    }
}

impl TryFrom<Vec<f64>> for WeightBasis {
    type Error = Error;
    fn try_from(weights: Vec<f64>) -> Result<Self> {
        Self::new(weights)
    }
}

impl From<WeightBasis> for Vec<f64> {
    fn from(b: WeightBasis) -> Self {
        b.weights
    }
}

pub(crate) fn weight_ratio(weights: &[f64]) -> f64 {
    let max = weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = weights.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// A point of `w_1 Z + ... + w_N Z` given by its integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SupportPoint {
    pub coeffs: Vec<i64>,
}

impl SupportPoint {
    pub fn value(&self, basis: &WeightBasis) -> f64 {
        basis.value(&self.coeffs)
    }
}

/// Finite signed measure over a [`WeightBasis`]. Atoms are kept sorted by
/// coefficient vector with no duplicates and no zero masses.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedMeasure {
    basis: WeightBasis,
    /// Flattened coefficient vectors, `basis.len()` per atom.
    coeffs: Vec<i64>,
    masses: Vec<f64>,
    error_budget: f64,
}

impl WeightedMeasure {
    /// Unit mass at the origin.
    pub fn identity(basis: &WeightBasis) -> Self {
        Self {
            basis: basis.clone(),
            coeffs: vec![0; basis.len()],
            masses: vec![1.0],
            error_budget: 0.0,
        }
    }

    /// Builds a measure from coefficient/mass pairs; repeated points add up.
    pub fn from_entries<I>(basis: &WeightBasis, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SupportPoint, f64)>,
    {
        let dim = basis.len();
        let mut coeffs = Vec::new();
        let mut masses = Vec::new();
        for (p, m) in entries {
            if p.coeffs.len() != dim {
                return Err(invalid(format!(
                    "support point has {} coefficients, basis has {dim}",
                    p.coeffs.len()
                )));
            }
            coeffs.extend_from_slice(&p.coeffs);
            masses.push(m);
        }
        Ok(Self::from_flat(basis.clone(), coeffs, masses, 0.0))
    }

    fn from_flat(basis: WeightBasis, coeffs: Vec<i64>, masses: Vec<f64>, budget: f64) -> Self {
        let dim = basis.len();
        let mut order: Vec<usize> = (0..masses.len()).collect();
        order.sort_unstable_by(|&a, &b| {
            coeffs[a * dim..(a + 1) * dim]
                .cmp(&coeffs[b * dim..(b + 1) * dim])
                .then(a.cmp(&b))
        });
        let mut out_coeffs: Vec<i64> = Vec::with_capacity(coeffs.len());
        let mut out_masses: Vec<f64> = Vec::with_capacity(masses.len());
        for idx in order {
            let key = &coeffs[idx * dim..(idx + 1) * dim];
            let same = !out_masses.is_empty() && &out_coeffs[out_coeffs.len() - dim..] == key;
            if same {
                *out_masses.last_mut().unwrap() += masses[idx];
            } else {
                out_coeffs.extend_from_slice(key);
                out_masses.push(masses[idx]);
            }
        }
        let mut m = Self {
            basis,
            coeffs: out_coeffs,
            masses: out_masses,
            error_budget: budget,
        };
        m.drop_zeros();
        m
    }

    fn drop_zeros(&mut self) {
        if self.masses.iter().all(|m| *m != 0.0) {
            return;
        }
        let dim = self.basis.len();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        let mut masses = Vec::with_capacity(self.masses.len());
        for (j, m) in self.masses.iter().enumerate() {
            if *m != 0.0 {
                coeffs.extend_from_slice(&self.coeffs[j * dim..(j + 1) * dim]);
                masses.push(*m);
            }
        }
        self.coeffs = coeffs;
        self.masses = masses;
    }

    pub fn basis(&self) -> &WeightBasis {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn error_budget(&self) -> f64 {
        self.error_budget
    }

    /// Atoms as `(coefficients, mass)` in coefficient order.
    pub fn entries(&self) -> impl Iterator<Item = (&[i64], f64)> + '_ {
        let dim = self.basis.len();
        self.coeffs.chunks(dim).zip(self.masses.iter().copied())
    }

    pub fn get(&self, point: &SupportPoint) -> f64 {
        let dim = self.basis.len();
        let found = self.bsearch(&point.coeffs, dim);
        found.map_or(0.0, |j| self.masses[j])
    }

    fn bsearch(&self, key: &[i64], dim: usize) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.masses.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.coeffs[mid * dim..(mid + 1) * dim].cmp(key) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn tv_norm(&self) -> f64 {
        self.masses.iter().map(|m| m.abs()).sum()
    }

    pub fn is_probability(&self) -> bool {
        self.masses.iter().all(|m| *m >= 0.0)
            && (self.total_mass() - 1.0).abs() <= PROBABILITY_TOLERANCE
    }

    /// `sum e^{it x} M{x}` over real positions `x`.
    pub fn char_fn(&self, t: f64) -> Complex64 {
        self.entries()
            .map(|(c, m)| Complex64::from_polar(m, t * self.basis.value(c)))
            .sum()
    }

    /// Atoms as `(real position, mass)`, sorted by position with positions
    /// closer than the merge tolerance combined.
    pub fn merged_atoms(&self) -> Vec<(f64, f64)> {
        let raw: Vec<(f64, f64)> = self
            .entries()
            .map(|(c, m)| (self.basis.value(c), m))
            .collect();
        merge_atoms(raw)
    }

    /// Coefficient-wise convolution; exact apart from floating point products.
    pub fn wconvolve(&self, other: &Self) -> Result<Self> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        let pairs = self.len().saturating_mul(other.len());
        if pairs > MAX_SUPPORT {
            return Err(Error::ResourceLimit {
                points: pairs,
                limit: MAX_SUPPORT,
            });
        }
        let dim = self.basis.len();
        let mut coeffs = Vec::with_capacity(pairs * dim);
        let mut masses = Vec::with_capacity(pairs);
        for (ca, ma) in self.entries() {
            for (cb, mb) in other.entries() {
                coeffs.extend(ca.iter().zip(cb).map(|(x, y)| x + y));
                masses.push(ma * mb);
            }
        }
        let budget = self.error_budget * other.tv_norm()
            + other.error_budget * self.tv_norm()
            + self.error_budget * other.error_budget;
        Ok(Self::from_flat(self.basis.clone(), coeffs, masses, budget))
    }

    /// Kolmogorov distance `sup_x |A((-inf,x]) - B((-inf,x])|` over the merged
    /// real support of both measures.
    pub fn wkolmogorov_distance(&self, other: &Self) -> Result<f64> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        let mut raw: Vec<(f64, f64)> = Vec::with_capacity(self.len() + other.len());
        raw.extend(self.entries().map(|(c, m)| (self.basis.value(c), m)));
        raw.extend(other.entries().map(|(c, m)| (other.basis.value(c), -m)));
        Ok(kolmogorov_of_atoms(merge_atoms(raw)))
    }

    /// Concentration `sup_x M{[x, x + h]}` over the merged real support.
    pub fn wconcentration(&self, h: f64) -> f64 {
        assert!(h >= 0.0, "window length must be nonnegative");
        window_max(&self.merged_atoms(), h)
    }
}

pub(crate) fn merge_tolerance(a: f64, b: f64) -> f64 {
    MERGE_RELATIVE * (1.0 + a.abs().max(b.abs()))
}

/// Sorts atoms by position and merges those within tolerance of the first
/// atom of their cluster. The merged position is that first atom's.
pub(crate) fn merge_atoms(mut raw: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
    for (x, m) in raw {
        match out.last_mut() {
            Some((anchor, acc)) if x - *anchor <= merge_tolerance(*anchor, x) => *acc += m,
            _ => out.push((x, m)),
        }
    }
    out
}

pub(crate) fn kolmogorov_of_atoms(atoms: Vec<(f64, f64)>) -> f64 {
    let mut acc = 0.0f64;
    let mut best = 0.0f64;
    for (_, m) in atoms {
        acc += m;
        best = best.max(acc.abs());
    }
    best
}

fn window_max(atoms: &[(f64, f64)], h: f64) -> f64 {
    let mut best = 0.0f64;
    let mut right = 0;
    let mut window = 0.0;
    for left in 0..atoms.len() {
        let limit = atoms[left].0 + h;
        while right < atoms.len() && atoms[right].0 <= limit + merge_tolerance(limit, atoms[right].0) {
            window += atoms[right].1;
            right += 1;
        }
        best = best.max(window);
        window -= atoms[left].1;
    }
    best
}

/// Places `F{k}` at coefficient vector `k e_index`.
pub fn lift(f: &LatticeMeasure, index: usize, basis: &WeightBasis) -> Result<WeightedMeasure> {
    let dim = basis.len();
    if index >= dim {
        return Err(Error::IndexOutOfRange { index, len: dim });
    }
    let mut coeffs = Vec::with_capacity(f.len() * dim);
    let mut masses = Vec::with_capacity(f.len());
    for (k, m) in f.entries() {
        let start = coeffs.len();
        coeffs.resize(start + dim, 0);
        coeffs[start + index] = k;
        masses.push(m);
    }
    Ok(WeightedMeasure {
        basis: basis.clone(),
        coeffs,
        masses,
        error_budget: f.error_budget(),
    })
}

/// One independent block of a weighted sum: `count` iid copies of `measure`
/// carried by weight `index`.
#[derive(Clone, Debug)]
pub struct Component {
    pub measure: LatticeMeasure,
    pub count: u64,
    pub index: usize,
}

/// Law of `sum_i w_i S_i` where `S_i` is the sum of `count` iid copies.
pub fn weighted_sum_distribution(components: &[Component], basis: &WeightBasis) -> Result<WeightedMeasure> {
    let mut acc = WeightedMeasure::identity(basis);
    for c in components {
        let lifted = lift(&c.measure.power(c.count), c.index, basis)?;
        acc = acc.wconvolve(&lifted)?;
    }
    Ok(acc)
}

#[derive(Serialize, Deserialize)]
struct WeightedRepr {
    weights: WeightBasis,
    entries: Vec<(Vec<i64>, f64)>,
}

impl Serialize for WeightedMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeightedRepr {
            weights: self.basis.clone(),
            entries: self.entries().map(|(c, m)| (c.to_vec(), m)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = WeightedRepr::deserialize(d)?;
        WeightedMeasure::from_entries(
            &repr.weights,
            repr.entries
                .into_iter()
                .map(|(coeffs, m)| (SupportPoint { coeffs }, m)),
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::CfOrder;

    fn sqrt2_basis() -> WeightBasis {
        WeightBasis::new(vec![1.0, 2f64.sqrt()]).unwrap()
    }

    fn example_f() -> LatticeMeasure {
        LatticeMeasure::from_entries([(0, 0.375), (1, 0.5), (4, 0.125)])
    }

    fn example_g() -> LatticeMeasure {
        LatticeMeasure::from_entries([(0, 0.45), (1, 0.25), (2, 0.25), (5, 0.05)])
    }

    #[test]
    fn basis_rejects_nonpositive() {
        assert!(WeightBasis::new(vec![]).is_err());
        assert!(WeightBasis::new(vec![1.0, 0.0]).is_err());
        assert!(WeightBasis::new(vec![-1.0]).is_err());
    }

    #[test]
    fn lift_point_mass() {
        let b = sqrt2_basis();
        let m = lift(&LatticeMeasure::delta(1), 1, &b).unwrap();
        let p = SupportPoint { coeffs: vec![0, 1] };
        assert_eq!(m.get(&p), 1.0);
        assert_eq!(p.value(&b), 2f64.sqrt());
        assert!(matches!(
            lift(&LatticeMeasure::delta(1), 2, &b),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn lift_preserves_norm_and_transform() {
        let b = sqrt2_basis();
        let m = lift(&example_f(), 1, &b).unwrap();
        assert_eq!(m.tv_norm(), example_f().tv_norm());
        let direct = example_f().char_fn(2f64.sqrt(), 0.0, CfOrder::Value);
        assert!((m.char_fn(1.0) - direct).norm() < 1e-15);
    }

    #[test]
    fn convolution_with_identity_and_mass() {
        let b = sqrt2_basis();
        let a = lift(&example_f(), 0, &b).unwrap();
        let id = lift(&LatticeMeasure::delta(0), 1, &b).unwrap();
        assert_eq!(a.wconvolve(&id).unwrap(), a);
        let c = lift(&(&example_g() * 0.5), 1, &b).unwrap();
        let prod = a.wconvolve(&c).unwrap();
        assert!((prod.total_mass() - a.total_mass() * c.total_mass()).abs() < 1e-12);
        for (coeffs, _) in prod.entries() {
            assert!([0, 1, 4].contains(&coeffs[0]));
            assert!([0, 1, 2, 5].contains(&coeffs[1]));
        }
        let other = WeightBasis::new(vec![1.0]).unwrap();
        assert!(matches!(
            a.wconvolve(&WeightedMeasure::identity(&other)),
            Err(Error::BasisMismatch)
        ));
    }

    #[test]
    fn weighted_sum_small_cases() {
        let unit = WeightBasis::new(vec![1.0]).unwrap();
        let d = weighted_sum_distribution(
            &[Component { measure: LatticeMeasure::bernoulli(0.5), count: 2, index: 0 }],
            &unit,
        )
        .unwrap();
        assert_eq!(d.merged_atoms(), vec![(0.0, 0.25), (1.0, 0.5), (2.0, 0.25)]);

        let two = WeightBasis::new(vec![2.0]).unwrap();
        let d = weighted_sum_distribution(
            &[Component { measure: LatticeMeasure::delta(1), count: 3, index: 0 }],
            &two,
        )
        .unwrap();
        assert_eq!(d.merged_atoms(), vec![(6.0, 1.0)]);
    }

    #[test]
    fn example_configuration_matches_enumeration() {
        let b = sqrt2_basis();
        let f = example_f();
        let d = weighted_sum_distribution(
            &[
                Component { measure: f.clone(), count: 2, index: 0 },
                Component { measure: f.clone(), count: 2, index: 1 },
            ],
            &b,
        )
        .unwrap();
        // brute force over all 3^4 outcome tuples
        let atoms: Vec<(i64, f64)> = f.entries().collect();
        let mut brute = std::collections::BTreeMap::new();
        for a in &atoms {
            for b2 in &atoms {
                for c in &atoms {
                    for e in &atoms {
                        *brute.entry((a.0 + b2.0, c.0 + e.0)).or_insert(0.0) += a.1 * b2.1 * c.1 * e.1;
                    }
                }
            }
        }
        assert_eq!(d.len(), brute.len());
        for ((c1, c2), m) in brute {
            let got = d.get(&SupportPoint { coeffs: vec![c1, c2] });
            assert!((got - m).abs() < 1e-15);
        }
        assert!((d.total_mass() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn distance_reduces_to_lattice_case() {
        let unit = WeightBasis::new(vec![1.0]).unwrap();
        let a = lift(&example_f(), 0, &unit).unwrap();
        let b = lift(&example_g(), 0, &unit).unwrap();
        assert_eq!(a.wkolmogorov_distance(&a).unwrap(), 0.0);
        let d = a.wkolmogorov_distance(&b).unwrap();
        assert!((d - 0.175).abs() < 1e-15);
    }

    #[test]
    fn concentration_windows() {
        let b = sqrt2_basis();
        let two_atoms = WeightedMeasure::from_entries(
            &b,
            [
                (SupportPoint { coeffs: vec![0, 0] }, 0.5),
                (SupportPoint { coeffs: vec![0, 1] }, 0.5),
            ],
        )
        .unwrap();
        assert_eq!(two_atoms.wconcentration(1.0), 0.5);
        assert_eq!(two_atoms.wconcentration(2.0), 1.0);
        let point = WeightedMeasure::identity(&b);
        assert_eq!(point.wconcentration(0.0), 1.0);
    }

    #[test]
    fn colliding_positions_merge() {
        // 3 * 1 and 1 * 3 collide exactly under commensurable weights (1, 3)
        let b = WeightBasis::new(vec![1.0, 3.0]).unwrap();
        let m = WeightedMeasure::from_entries(
            &b,
            [
                (SupportPoint { coeffs: vec![3, 0] }, 0.25),
                (SupportPoint { coeffs: vec![0, 1] }, 0.75),
            ],
        )
        .unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.merged_atoms(), vec![(3.0, 1.0)]);
    }

    #[test]
    fn json_shape() {
        let b = sqrt2_basis();
        let m = lift(&LatticeMeasure::bernoulli(0.5), 1, &b).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(
            s,
            format!(r#"{{"weights":[1.0,{}],"entries":[[[0,0],0.5],[[0,1],0.5]]}}"#, 2f64.sqrt())
        );
        let back: WeightedMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}

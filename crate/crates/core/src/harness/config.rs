use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::measure::LatticeMeasure;
use crate::DEFAULT_TAIL_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Example,
    IidSweep,
    MarkovSweep,
    NbSweep,
    Check,
    DemoIntro,
}

/// How a block's summand count follows the sweep parameter `n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CountRule {
    #[default]
    N,
    /// `ceil(sqrt(n))`
    Sqrt,
    Fixed {
        value: u64,
    },
}

impl CountRule {
    pub fn count(self, n: u64) -> u64 {
        match self {
            CountRule::N => n,
            CountRule::Sqrt => ceil_sqrt(n),
            CountRule::Fixed { value } => value,
        }
    }
}

/// Smallest integer whose square is at least `n`.
pub fn ceil_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while r * r < n {
        r += 1;
    }
    r
}

/// Block of iid summands `f` (approximated by `g` where the kind needs one).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockConfig {
    pub f: LatticeMeasure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<LatticeMeasure>,
    pub weight: f64,
    #[serde(default)]
    pub count: CountRule,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovBlockConfig {
    pub p: f64,
    pub q_bar: f64,
    pub weight: f64,
    #[serde(default)]
    pub count: CountRule,
}

fn default_k0() -> u32 {
    2
}

fn default_tail_tol() -> f64 {
    DEFAULT_TAIL_TOL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub n_grid: Vec<u64>,
    #[serde(default)]
    pub blocks: Vec<BlockConfig>,
    #[serde(default)]
    pub markov: Vec<MarkovBlockConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    #[serde(default = "default_k0")]
    pub k0: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// The two laws of the worked example.
pub fn example_pair() -> (LatticeMeasure, LatticeMeasure) {
    (
        LatticeMeasure::from_entries([(0, 0.375), (1, 0.5), (4, 0.125)]),
        LatticeMeasure::from_entries([(0, 0.45), (1, 0.25), (2, 0.25), (5, 0.05)]),
    )
}

impl ExperimentConfig {
    fn empty(kind: ExperimentKind, n_grid: Vec<u64>) -> Self {
        Self {
            kind,
            n_grid,
            blocks: Vec::new(),
            markov: Vec::new(),
            s: None,
            k0: default_k0(),
            seed: None,
            count: None,
            tail_tol: DEFAULT_TAIL_TOL,
            output: None,
        }
    }

    /// Two blocks, `ceil(sqrt n)` copies at weight 1 and `n` copies at `sqrt 2`.
    pub fn example() -> Self {
        let (f, g) = example_pair();
        let mut c = Self::empty(ExperimentKind::Example, vec![16, 64, 256, 1024]);
        c.blocks = vec![
            BlockConfig { f: f.clone(), g: Some(g.clone()), weight: 1.0, count: CountRule::Sqrt },
            BlockConfig { f, g: Some(g), weight: 2f64.sqrt(), count: CountRule::N },
        ];
        c.s = Some(3);
        c
    }

    pub fn markov_default() -> Self {
        let mut c = Self::empty(ExperimentKind::MarkovSweep, vec![50, 100, 200, 400]);
        c.markov = vec![MarkovBlockConfig { p: 0.3, q_bar: 0.02, weight: 1.0, count: CountRule::N }];
        c
    }

    pub fn nb_default() -> Self {
        let (f, _) = example_pair();
        let mut c = Self::empty(ExperimentKind::NbSweep, vec![25, 100, 400, 1600]);
        c.blocks = vec![BlockConfig { f, g: None, weight: 1.0, count: CountRule::N }];
        c
    }

    pub fn check_default(seed: u64, count: usize) -> Self {
        let mut c = Self::empty(ExperimentKind::Check, Vec::new());
        c.seed = Some(seed);
        c.count = Some(count);
        c
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: Self = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(invalid(format!("tail_tol must lie in (0, 1), got {}", self.tail_tol)));
        }
        if self.kind == ExperimentKind::Check {
            if self.seed.is_none() {
                return Err(invalid("check runs need a seed"));
            }
            if self.count == Some(0) {
                return Err(invalid("check count must be at least 1"));
            }
            return Ok(());
        }
        if self.n_grid.is_empty() {
            return Err(invalid("n_grid is empty"));
        }
        if self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("n_grid must be positive and strictly increasing"));
        }
        match self.kind {
            ExperimentKind::Example | ExperimentKind::IidSweep => {
                if self.blocks.is_empty() || self.blocks.iter().any(|b| b.g.is_none()) {
                    return Err(invalid("iid sweeps need blocks with both f and g"));
                }
                if self.s.is_none_or(|s| s == 0) {
                    return Err(invalid("iid sweeps need s >= 1"));
                }
            }
            ExperimentKind::NbSweep if self.blocks.is_empty() => {
                return Err(invalid("nb sweeps need at least one block"));
            }
            ExperimentKind::MarkovSweep if self.markov.is_empty() => {
                return Err(invalid("markov sweeps need at least one chain"));
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_sqrt_values() {
        let got: Vec<u64> = [1, 2, 4, 5, 16, 17, 64, 1024, 1025].iter().map(|n| ceil_sqrt(*n)).collect();
        assert_eq!(got, vec![1, 2, 2, 3, 4, 5, 8, 32, 33]);
    }

    #[test]
    fn defaults_validate() {
        for c in [
            ExperimentConfig::example(),
            ExperimentConfig::markov_default(),
            ExperimentConfig::nb_default(),
            ExperimentConfig::check_default(1, 10),
        ] {
            c.validate().unwrap();
        }
    }

    #[test]
    fn rejects_unsorted_grid_and_missing_seed() {
        let mut c = ExperimentConfig::example();
        c.n_grid = vec![16, 16, 64];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::check_default(1, 10);
        c.seed = None;
        assert!(c.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = ExperimentConfig::example();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"kind\":\"example\""));
        assert!(text.contains("\"rule\":\"sqrt\""));
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);

        let minimal = r#"{"kind":"markov-sweep","n_grid":[10,20,40],
            "markov":[{"p":0.3,"q_bar":0.02,"weight":1.0}]}"#;
        let c: ExperimentConfig = serde_json::from_str(minimal).unwrap();
        assert_eq!(c.k0, 2);
        assert_eq!(c.markov[0].count, CountRule::N);
        c.validate().unwrap();
    }
}

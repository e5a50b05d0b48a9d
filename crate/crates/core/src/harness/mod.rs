//! Experiment plumbing: configs, random instances, sweeps, the inequality
//! suite, rate fitting and CSV/JSON reporting.

pub mod check;
pub mod config;
pub mod fit;
pub mod generate;
pub mod report;
pub mod sweeps;

pub use check::{run_check, CheckReport};
pub use config::{BlockConfig, CountRule, ExperimentConfig, ExperimentKind, MarkovBlockConfig};
pub use fit::{fit_rate, spread, RateFit};
pub use generate::gen_matched_pair;
pub use sweeps::{demo_intro, run_example, run_iid, run_markov, run_nb, SweepResult, SweepRow};

//! Exact distributions of weighted sums `S = w_1 S_1 + ... + w_N S_N` of
//! integer-valued random variables, the approximants used to compare them
//! (factorial-moment-matched laws, moment-matched negative binomial, signed
//! compound-Poisson measures for Markov binomial sums) and the structural
//! factors of the Kolmogorov-distance bounds that relate them.
//!
//! The building blocks:
//!
//! * [`measure`]: finite signed measures on the integer lattice with exact
//!   convolution, norms, transforms and factorial moments.
//! * [`weighted`]: measures on `w_1 Z + ... + w_N Z`, stored by integer
//!   coefficient vectors so incommensurable weights never collide.
//! * [`approximants`]: negative binomial matching, the geometric excess
//!   measure and the signed compound-Poisson measure `D`.
//! * [`markov`]: the Markov binomial law and its parameter conditions.
//! * [`bounds`]: constant-free bound factors and the moment-matched gap check.
//! * [`harness`]: sweeps, the inequality suite, rate fitting and reporting.

pub mod approximants;
pub mod bounds;
pub mod error;
pub mod harness;
pub mod markov;
pub mod measure;
pub mod quadrature;
pub mod weighted;

pub use error::{Error, Result};
pub use measure::{CfOrder, LatticeMeasure, MomentSummary, Side};
pub use weighted::{SupportPoint, WeightBasis, WeightedMeasure};

/// Default truncation tolerance for series and infinite-support pmfs.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

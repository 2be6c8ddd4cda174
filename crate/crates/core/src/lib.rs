//! Equalization probability of the Pólya urn.
//!
//! An urn holds `b` black and `w` white balls; each draw returns the ball
//! together with a copy of it. This crate answers "does the urn ever hold
//! equally many of each color?" four ways and lets them check each other:
//!
//! * [`exact`]: closed forms `2 F_{b,w}(1/2)` and two binomial sums, in exact
//!   rational arithmetic.
//! * [`dp`] and [`enumerate`]: exact finite-horizon first-passage laws by
//!   forward recursion and by brute-force enumeration of draw sequences.
//! * [`simulate`]: seeded, stream-partitioned Monte Carlo (direct trajectories
//!   and a beta-mixture of biased-walk ruin probabilities).
//! * [`approx`]: normal approximation and Chernoff upper bound.
//!
//! The `parallel` feature (on by default) runs Monte Carlo blocks, DP rows and
//! sweeps on rayon; results do not depend on it.

pub mod approx;
pub mod decimal;
pub mod dp;
pub mod enumerate;
mod error;
pub mod exact;
pub mod exec;
pub mod simulate;

pub use approx::{
    chernoff_bound, normal_approximation, standard_normal_cdf, ApproxKind, ApproxResult,
};
pub use dp::{first_passage_dp, first_passage_dp_with, DpTable, DEFAULT_MEMORY_BUDGET};
pub use enumerate::{
    enumerate_sequences, first_passage_by_enumeration, marginal_black_distribution, Draw,
    SequenceProbability,
};
pub use error::{Error, Result};
pub use exact::{
    beta_cdf_rational, beta_cdf_real, beta_density, binomial_coefficient, equalization_probability,
    equalization_probability_binomial, equalization_probability_complement, BetaParams,
    ExactProbability, UrnConfig,
};
pub use exec::Execution;
pub use simulate::{
    definetti_estimator, estimate_equalization, limit_fraction_sample, run_first_passage,
    sample_beta_order_statistic, step_urn, EstimateWithCI, FirstPassageSample, RngSeed, UrnState,
};

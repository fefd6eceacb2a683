//! Confidence intervals for a binomial proportion, with and without
//! randomization, plus an exact evaluation engine.
//!
//! The crate provides three families of interval constructions:
//!
//! * non-randomized intervals (Wilson, Clopper-Pearson, mid-p),
//! * externally randomized intervals (split-sample Wilson, U(-1/2,1/2)
//!   Wilson, Stevens), whose bounds depend on an auxiliary random draw,
//! * data-randomized intervals (Korn, data-randomized U-Wilson), where the
//!   auxiliary randomness is read off the order of the recorded trials.
//!
//! The [`evaluation`] module computes coverage, expected length, bound
//! ranges and distinct-value counts for all of these by analytic
//! marginalization over the randomization source, not by Monte Carlo.
//!
//! All functions are pure: no globals, no interior mutability, safe to call
//! from any number of threads.

pub mod datarand;
pub mod dist;
pub mod evaluation;
pub mod intervals;
pub mod quadrature;

pub use datarand::{PermutationRank, TrialSequence};
pub use evaluation::{BoundRange, DistinctValueCount, EvaluationPoint};
pub use intervals::{
    BinomialSample, ConfidenceInterval, EffectiveCount, Method, MethodSpec, RandomizationDraw,
    SplitDesign,
};

/// Errors reported by this crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An argument violated a precondition (out-of-range count, probability,
    /// quantile level, randomization value...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A derived configuration is unusable, e.g. the split-size rule
    /// degenerates to two equal halves.
    #[error("configuration error: {0}")]
    Config(String),
    /// Malformed textual input, e.g. a trial sequence with characters other
    /// than '0' and '1'.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

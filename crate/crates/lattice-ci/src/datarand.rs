//! Trial sequences and data-randomized intervals.
//!
//! When the individual Bernoulli outcomes were recorded, their order is an
//! ancillary statistic that can stand in for an external randomization
//! source. The sequence is ranked among all distinct rearrangements with
//! the same success count: read the bits as the base-2 fraction
//! 0.b₁b₂...bₙ and sort; ranks k run from 1 (smallest fraction) to C(n, x),
//! and u = k / C(n, x) plays the role of the uniform draw. The ranking is
//! computed by combinatorial prefix counting in O(n) binomial evaluations,
//! never by enumerating the permutations.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::intervals::{
    split_sample_sizes, split_tilde_x, stevens, u_noise_wilson, BinomialSample, ConfidenceInterval,
    EffectiveCount,
};
use crate::{Error, Result};

/// An ordered record of Bernoulli outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialSequence {
    bits: Vec<bool>,
}

impl TrialSequence {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Domain("trial sequence must be non-empty".into()));
        }
        Ok(Self { bits })
    }

    pub fn n(&self) -> u64 {
        self.bits.len() as u64
    }

    pub fn successes(&self) -> u64 {
        self.bits.iter().filter(|&&b| b).count() as u64
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// The aggregated (n, x) pair, forgetting the order.
    pub fn sample(&self) -> BinomialSample {
        BinomialSample::new(self.n(), self.successes()).expect("counts are consistent")
    }

    pub fn reversed(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.reverse();
        Self { bits }
    }
}

impl FromStr for TrialSequence {
    type Err = Error;

    /// Parses "0010110"-style strings; surrounding whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty trial sequence".into()));
        }
        let mut bits = Vec::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => {
                    return Err(Error::Parse(format!(
                        "trial sequence may contain only '0' and '1', found {c:?} at position {i}"
                    )))
                }
            }
        }
        Ok(Self { bits })
    }
}

impl fmt::Display for TrialSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// The rank k of a sequence among all C(n, x) same-weight rearrangements,
/// ordered by base-2 fractional value; u = k / C(n, x) is in (0, 1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationRank {
    rank: BigUint,
    total: BigUint,
}

impl PermutationRank {
    /// 1-based rank k*.
    pub fn rank(&self) -> &BigUint {
        &self.rank
    }

    /// C(n, x), the number of distinct rearrangements.
    pub fn total(&self) -> &BigUint {
        &self.total
    }

    /// u = k / C(n, x).
    pub fn u(&self) -> f64 {
        big_ratio_to_f64(&self.rank, &self.total)
    }
}

/// a/b as f64 for arbitrary-size positive integers with a <= b.
fn big_ratio_to_f64(a: &BigUint, b: &BigUint) -> f64 {
    let af = a.to_f64().unwrap_or(f64::INFINITY);
    let bf = b.to_f64().unwrap_or(f64::INFINITY);
    if af.is_finite() && bf.is_finite() && bf > 0.0 {
        return (af / bf).clamp(0.0, 1.0);
    }
    // counts past f64::MAX: divide aligned 63-bit windows instead
    let shift = b.bits().saturating_sub(63);
    let a_top = (a >> shift).to_f64().unwrap_or(0.0);
    let b_top = (b >> shift).to_f64().unwrap_or(1.0);
    (a_top / b_top).clamp(0.0, 1.0)
}

/// Exact C(n, k) by the multiplicative recurrence; 0 for k > n.
pub(crate) fn big_binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc = acc * BigUint::from(n - k + i) / BigUint::from(i);
    }
    acc
}

/// Rank of `seq` among all same-weight sequences.
///
/// Counts, position by position, the sequences that share the prefix, put a
/// 0 where `seq` has a 1, and spend their remaining successes on the
/// suffix; those are exactly the strictly-smaller sequences. Degenerate
/// weights x = 0 and x = n have a single arrangement, so k = 1 and u = 1.
pub fn sequence_rank(seq: &TrialSequence) -> PermutationRank {
    let n = seq.n();
    let x = seq.successes();
    let mut smaller = BigUint::zero();
    let mut ones_left = x;
    for (i, &bit) in seq.bits().iter().enumerate() {
        if bit {
            let remaining = n - i as u64 - 1;
            if ones_left > 0 {
                smaller += big_binom(remaining, ones_left);
            }
            ones_left -= 1;
        }
    }
    PermutationRank {
        rank: smaller + BigUint::one(),
        total: big_binom(n, x),
    }
}

/// Stevens interval with ν₁ = u and ν₂ = 1 - u, u the normalized rank of
/// the observed sequence.
pub fn korn_interval(seq: &TrialSequence, alpha: f64) -> Result<ConfidenceInterval> {
    let u = sequence_rank(seq).u();
    stevens(&seq.sample(), alpha, u, 1.0 - u)
}

/// U-noise Wilson interval with y = u - 1/2 read off the sequence rank.
pub fn data_randomized_u_wilson(seq: &TrialSequence, alpha: f64) -> Result<ConfidenceInterval> {
    let u = sequence_rank(seq).u();
    u_noise_wilson(&seq.sample(), alpha, u - 0.5)
}

/// Effective count from the order-based split: the first n1 recorded
/// trials form the first subsample.
pub fn split_by_order(seq: &TrialSequence) -> Result<EffectiveCount> {
    let design = split_sample_sizes(seq.n())?;
    let z = seq.bits()[..design.n1() as usize]
        .iter()
        .filter(|&&b| b)
        .count() as u64;
    split_tilde_x(&seq.sample(), &design, z)
}

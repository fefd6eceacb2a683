//! Interval constructions: the Wilson family on real-valued effective
//! counts, and the Stevens tail-equation family (Clopper-Pearson and mid-p
//! are its ν₁ = ν₂ = 1 and ν₁ = ν₂ = 1/2 members).

use crate::dist;
use crate::{Error, Result};

/// The observed pair (n, x): n Bernoulli trials, x successes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinomialSample {
    n: u64,
    x: u64,
}

impl BinomialSample {
    pub fn new(n: u64, x: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("sample needs n >= 1 trials".into()));
        }
        if x > n {
            return Err(Error::Domain(format!("x = {x} outside [0, {n}]")));
        }
        Ok(Self { n, x })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    /// Maximum likelihood estimate x/n.
    pub fn p_hat(&self) -> f64 {
        self.x as f64 / self.n as f64
    }

    /// The sample with successes and failures exchanged.
    pub fn mirrored(&self) -> Self {
        Self {
            n: self.n,
            x: self.n - self.x,
        }
    }
}

/// A two-sided confidence interval (p_L, p_U) in [0, 1]^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    lower: f64,
    upper: f64,
}

impl ConfidenceInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite()
            && upper.is_finite()
            && 0.0 <= lower
            && lower <= upper
            && upper <= 1.0)
        {
            return Err(Error::Domain(format!(
                "invalid interval ({lower}, {upper})"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    /// Open-interval membership: a true p equal to a bound does not count.
    pub fn contains(&self, p: f64) -> bool {
        self.lower < p && p < self.upper
    }

    /// The reflection (1 - upper, 1 - lower).
    pub fn mirrored(&self) -> Self {
        Self {
            lower: 1.0 - self.upper,
            upper: 1.0 - self.lower,
        }
    }
}

/// A split of n trials into two subsamples of unequal sizes n1 + n2 = n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitDesign {
    n1: u64,
    n2: u64,
}

impl SplitDesign {
    pub fn new(n1: u64, n2: u64) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::Config("both subsamples must be non-empty".into()));
        }
        if n1 == n2 {
            return Err(Error::Config(format!(
                "subsample sizes must differ, got n1 = n2 = {n1}"
            )));
        }
        Ok(Self { n1, n2 })
    }

    pub fn n(&self) -> u64 {
        self.n1 + self.n2
    }

    pub fn n1(&self) -> u64 {
        self.n1
    }

    pub fn n2(&self) -> u64 {
        self.n2
    }
}

/// A real-valued effective success count in [0, n], the x̃ that replaces the
/// integer count in a closed-form interval formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCount {
    n: u64,
    value: f64,
}

impl EffectiveCount {
    pub fn new(n: u64, value: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("effective count needs n >= 1".into()));
        }
        if !(value.is_finite() && (0.0..=n as f64).contains(&value)) {
            return Err(Error::Domain(format!(
                "effective count {value} outside [0, {n}]"
            )));
        }
        Ok(Self { n, value })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// The smoothed point estimate x̃/n.
    pub fn p_hat(&self) -> f64 {
        self.value / self.n as f64
    }
}

/// One draw from a method's randomization source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RandomizationDraw {
    /// Hypergeometric split count Z (split-sample Wilson).
    HypergeometricZ(u64),
    /// Additive noise y in [-1/2, 1/2] (U-noise Wilson).
    UniformNoise(f64),
    /// Boundary weight ν₁ in (0, 1]; ν₂ = 1 - ν₁ is implied (Stevens).
    StevensNu(f64),
    /// Normalized permutation rank u = k/C(n,x) in (0, 1] (data-randomized).
    RankU(f64),
}

/// Interval construction method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Wilson,
    ClopperPearson,
    MidP,
    SplitWilson,
    UNoiseWilson,
    Stevens,
    Korn,
    DataRandUWilson,
}

impl Method {
    /// Bounds depend on a randomization source (external or data-driven).
    pub fn is_randomized(&self) -> bool {
        !matches!(self, Method::Wilson | Method::ClopperPearson | Method::MidP)
    }

    /// Bounds depend on an external source of randomness.
    pub fn is_externally_randomized(&self) -> bool {
        matches!(
            self,
            Method::SplitWilson | Method::UNoiseWilson | Method::Stevens
        )
    }

    /// Randomization is read off the order of the recorded trials.
    pub fn is_data_randomized(&self) -> bool {
        matches!(self, Method::Korn | Method::DataRandUWilson)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Wilson => "wilson",
            Method::ClopperPearson => "clopper-pearson",
            Method::MidP => "mid-p",
            Method::SplitWilson => "split-wilson",
            Method::UNoiseWilson => "u-noise-wilson",
            Method::Stevens => "stevens",
            Method::Korn => "korn",
            Method::DataRandUWilson => "data-rand-u-wilson",
        }
    }
}

/// A method together with its nominal level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSpec {
    method: Method,
    alpha: f64,
}

impl MethodSpec {
    pub fn new(method: Method, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { method, alpha })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha = {alpha} outside (0, 1)")));
    }
    Ok(())
}

/// Wilson score interval at a (possibly non-integer) effective count.
pub fn wilson(n: u64, x_eff: f64, alpha: f64) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    let count = EffectiveCount::new(n, x_eff)?;
    let z = dist::normal_quantile(1.0 - alpha / 2.0)?;
    let nf = n as f64;
    let z2 = z * z;
    let p_hat = count.p_hat();
    let center = (x_eff + z2 / 2.0) / (nf + z2);
    let half = z / (nf + z2) * (p_hat * (1.0 - p_hat) * nf + z2 / 4.0).sqrt();
    // the clamp is provably inactive for x_eff in [0, n]
    ConfidenceInterval::new((center - half).max(0.0), (center + half).min(1.0))
}

/// Subsample sizes n1 = round(n/2 + 0.15 n^{3/4}), n2 = n - n1, rounding
/// half away from zero. Fails when the rule degenerates (n1 = n2, which
/// happens for n = 2 and n = 4).
pub fn split_sample_sizes(n: u64) -> Result<SplitDesign> {
    if n < 2 {
        return Err(Error::Domain(format!("cannot split n = {n} trials")));
    }
    let nf = n as f64;
    let n1 = (nf / 2.0 + 0.15 * nf.powf(0.75)).round() as u64;
    if n1 == 0 || n1 >= n {
        return Err(Error::Config(format!(
            "split-size rule left an empty subsample for n = {n}"
        )));
    }
    SplitDesign::new(n1, n - n1)
}

/// Effective count x̃ = (n/(2 n1)) z + (n/(2 n2)) (x - z), i.e. n times the
/// average of the two subsample proportions when the first subsample holds
/// z of the x successes.
pub fn split_tilde_x(
    sample: &BinomialSample,
    design: &SplitDesign,
    z: u64,
) -> Result<EffectiveCount> {
    let n = sample.n();
    if design.n() != n {
        return Err(Error::Domain(format!(
            "design ({}, {}) does not split n = {n}",
            design.n1(),
            design.n2()
        )));
    }
    let (lo, hi) = dist::hypergeom_support(n, sample.x(), design.n1())?;
    if z < lo || z > hi {
        return Err(Error::Domain(format!(
            "z = {z} outside the hypergeometric support [{lo}, {hi}]"
        )));
    }
    let nf = n as f64;
    let value = nf / (2.0 * design.n1() as f64) * z as f64
        + nf / (2.0 * design.n2() as f64) * (sample.x() - z) as f64;
    // float round-off can overshoot [0, n] by a few ulps at the extremes
    EffectiveCount::new(n, value.clamp(0.0, nf))
}

/// Split-sample Wilson interval for the draw Z = z.
pub fn split_sample_wilson(
    sample: &BinomialSample,
    alpha: f64,
    z: u64,
) -> Result<ConfidenceInterval> {
    let design = split_sample_sizes(sample.n())?;
    let count = split_tilde_x(sample, &design, z)?;
    wilson(sample.n(), count.value(), alpha)
}

/// Wilson interval at x + y with y in [-1/2, 1/2]; x + y is clamped into
/// [0, n] so the point estimate stays a probability.
pub fn u_noise_wilson(sample: &BinomialSample, alpha: f64, y: f64) -> Result<ConfidenceInterval> {
    if !(y.is_finite() && (-0.5..=0.5).contains(&y)) {
        return Err(Error::Domain(format!("y = {y} outside [-1/2, 1/2]")));
    }
    let x_eff = (sample.x() as f64 + y).clamp(0.0, sample.n() as f64);
    wilson(sample.n(), x_eff, alpha)
}

fn bisect_root<F: Fn(f64) -> f64>(g: F, target: f64, increasing: bool) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut iter = 0;
    while hi - lo > 1e-12 && iter < 60 {
        let mid = 0.5 * (lo + hi);
        let below = g(mid) < target;
        if below == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
        iter += 1;
    }
    0.5 * (lo + hi)
}

/// Interval from the two tail equations
///
/// ```text
/// nu1 * P(X = x; p_L) + P(X > x; p_L) = alpha/2
/// nu2 * P(X = x; p_U) + P(X < x; p_U) = alpha/2
/// ```
///
/// The left-hand sides are monotone in p (increasing for the lower
/// equation, decreasing for the upper), so each root is found by bisection
/// to 1e-12. When an equation has no root in (0, 1) the bound sits at the
/// endpoint the test inversion dictates: a lower equation that starts at or
/// above alpha/2 gives p_L = 0 and one that stays below gives p_L = 1;
/// mirrored for the upper equation. With nu2 = 1 - nu1 the two statistics
/// sum to one, which keeps p_L <= p_U; for unrelated (nu1, nu2) with
/// nu1 + nu2 < 1 both tests can reject everything, and the empty set is
/// reported as the degenerate point midway between the crossed roots.
pub fn stevens(
    sample: &BinomialSample,
    alpha: f64,
    nu1: f64,
    nu2: f64,
) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    for nu in [nu1, nu2] {
        if !(nu.is_finite() && (0.0..=1.0).contains(&nu)) {
            return Err(Error::Domain(format!("nu = {nu} outside [0, 1]")));
        }
    }
    let (n, x) = (sample.n(), sample.x());
    let half = alpha / 2.0;

    // limits of the tail statistics at p -> 0+ and p -> 1-
    let gl0 = if x == 0 { nu1 } else { 0.0 };
    let gl1 = if x == n { nu1 } else { 1.0 };
    let lower = if gl0 >= half {
        0.0
    } else if gl1 <= half {
        1.0
    } else {
        bisect_root(
            |p| nu1 * dist::binom_pmf_raw(n, p, x) + dist::binom_sf_raw(n, p, x as i64),
            half,
            true,
        )
    };

    let gu0 = if x == 0 { nu2 } else { 1.0 };
    let gu1 = if x == n { nu2 } else { 0.0 };
    let upper = if gu1 >= half {
        1.0
    } else if gu0 <= half {
        0.0
    } else {
        bisect_root(
            |p| nu2 * dist::binom_pmf_raw(n, p, x) + dist::binom_cdf_raw(n, p, x as i64 - 1),
            half,
            false,
        )
    };

    if upper < lower {
        let mid = 0.5 * (lower + upper);
        ConfidenceInterval::new(mid, mid)
    } else {
        ConfidenceInterval::new(lower, upper)
    }
}

/// Clopper-Pearson interval: the ν₁ = ν₂ = 1 member of the tail-equation
/// family.
pub fn clopper_pearson(sample: &BinomialSample, alpha: f64) -> Result<ConfidenceInterval> {
    stevens(sample, alpha, 1.0, 1.0)
}

/// Mid-p interval: the ν₁ = ν₂ = 1/2 member of the tail-equation family.
pub fn mid_p(sample: &BinomialSample, alpha: f64) -> Result<ConfidenceInterval> {
    stevens(sample, alpha, 0.5, 0.5)
}

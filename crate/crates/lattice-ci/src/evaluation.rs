//! Exact coverage, expected length, bound-range and distinct-value-count
//! computations, marginalizing analytically over each method's
//! randomization source — no Monte Carlo anywhere.
//!
//! Coverage convention: intervals are open, (p_L, p_U); a true p exactly
//! equal to a bound counts as non-coverage. This only matters for the
//! non-randomized methods, where ties can occur on a lattice of p values.
//!
//! Per-method marginalization:
//!
//! * deterministic methods: an indicator,
//! * split-sample Wilson: exact sum over the hypergeometric support,
//! * U-noise Wilson: the Lebesgue measure of the covering y set, located by
//!   bisection on the two monotone bound functions,
//! * Stevens: the ν₁ window derived from the monotone tail statistics
//!   (p is covered iff ν₁ f + S⁺ > α/2 and (1-ν₁) f + S⁻ > α/2, i.e. iff
//!   (α/2 - S⁺)/f < ν₁ < 1 - (α/2 - S⁻)/f),
//! * Korn and data-randomized U-Wilson: the same windows restricted to the
//!   rank lattice {k/C(n,x)}, counted without enumerating sequences.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::datarand::big_binom;
use crate::dist::{
    binom_cdf_raw, binom_pmf_raw, binom_sf_raw, hypergeom_pmf_raw, hypergeom_support,
};
use crate::intervals::{
    clopper_pearson, mid_p, split_sample_sizes, split_sample_wilson, stevens, u_noise_wilson,
    wilson, BinomialSample, Method, MethodSpec,
};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

/// Quadrature size used by [`conditional_expected_length`].
pub const DEFAULT_QUADRATURE_NODES: usize = 256;

/// Rank lattices up to this size are averaged exactly; larger ones fall
/// back to quadrature over the continuous randomization.
pub const EXACT_LATTICE_LIMIT: u64 = 1_000_000;

/// Coverage and expected length at one true proportion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationPoint {
    pub p: f64,
    pub coverage: f64,
    pub expected_length: f64,
}

/// Extremes of an interval endpoint over the randomization domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRange {
    min_upper: f64,
    max_upper: f64,
}

impl BoundRange {
    fn new(min_upper: f64, max_upper: f64) -> Result<Self> {
        if !(min_upper.is_finite() && max_upper.is_finite() && min_upper <= max_upper) {
            return Err(Error::Domain(format!(
                "invalid bound range ({min_upper}, {max_upper})"
            )));
        }
        Ok(Self {
            min_upper,
            max_upper,
        })
    }

    pub fn min_upper(&self) -> f64 {
        self.min_upper
    }

    pub fn max_upper(&self) -> f64 {
        self.max_upper
    }

    pub fn range(&self) -> f64 {
        self.max_upper - self.min_upper
    }
}

/// How many values the randomization can produce at a given n, across all x.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinctValueCount {
    /// Distinct effective counts x̃ over all (x, z) pairs.
    pub split: u64,
    /// Distinct (x, rank) pairs: sum of C(n, x) over x, i.e. 2^n.
    pub korn: BigUint,
}

fn check_prob(p: f64, what: &str) -> Result<()> {
    if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
        return Err(Error::Domain(format!("{what} = {p} outside [0, 1]")));
    }
    Ok(())
}

/// ν₁ window (lo, hi): p is covered iff lo < ν₁ < hi, taking ν₂ = 1 - ν₁.
/// Unclipped; the ends run past [0, 1] (or to ±∞) when a constraint is
/// slack for every ν₁.
fn stevens_nu_window(n: u64, x: u64, alpha: f64, p: f64) -> (f64, f64) {
    let half = alpha / 2.0;
    let f = binom_pmf_raw(n, p, x);
    if f == 0.0 {
        let s_plus = binom_sf_raw(n, p, x as i64);
        let s_minus = binom_cdf_raw(n, p, x as i64 - 1);
        return if s_plus > half && s_minus > half {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            (0.0, 0.0)
        };
    }
    let s_plus = binom_sf_raw(n, p, x as i64);
    let s_minus = binom_cdf_raw(n, p, x as i64 - 1);
    ((half - s_plus) / f, 1.0 - (half - s_minus) / f)
}

/// y window (t_lo, t_hi): p is covered by the U-noise Wilson interval iff
/// t_lo < y < t_hi. Both Wilson bounds are nondecreasing in y, so each
/// threshold is found by bisection; the sentinels -1 and +1 signal that p
/// stays covered through the corresponding edge of [-1/2, 1/2].
fn wilson_y_window(sample: &BinomialSample, alpha: f64, p: f64) -> (f64, f64) {
    let bound = |y: f64, upper: bool| {
        let ci = u_noise_wilson(sample, alpha, y).expect("y within [-1/2, 1/2]");
        if upper {
            ci.upper()
        } else {
            ci.lower()
        }
    };

    // t_hi: rightmost y with lower(y) < p (predicate true on the left)
    let t_hi = if bound(-0.5, false) >= p {
        -1.0
    } else if bound(0.5, false) < p {
        1.0
    } else {
        let (mut a, mut b) = (-0.5f64, 0.5f64);
        for _ in 0..52 {
            let m = 0.5 * (a + b);
            if bound(m, false) < p {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };

    // t_lo: leftmost y with upper(y) > p (predicate true on the right)
    let t_lo = if bound(-0.5, true) > p {
        -1.0
    } else if bound(0.5, true) <= p {
        1.0
    } else {
        let (mut a, mut b) = (-0.5f64, 0.5f64);
        for _ in 0..52 {
            let m = 0.5 * (a + b);
            if bound(m, true) > p {
                b = m;
            } else {
                a = m;
            }
        }
        0.5 * (a + b)
    };

    (t_lo, t_hi)
}

/// Fraction of the rank lattice {k/C : k = 1..C} falling strictly inside
/// (lo, hi). Counted exactly while C fits in 53 bits; beyond that the
/// lattice correction is below 1e-15 and the continuous length is used.
fn lattice_fraction(lo: f64, hi: f64, total: &BigUint) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if let Some(c) = total.to_u64().filter(|&c| c <= (1u64 << 53)) {
        let cf = c as f64;
        let lo_c = lo.clamp(-1.0, 2.0);
        let hi_c = hi.clamp(-1.0, 2.0);
        let first = ((lo_c * cf).floor() as i128 + 1).max(1);
        let last = (((hi_c * cf).ceil() as i128) - 1).min(c as i128);
        ((last - first + 1).max(0)) as f64 / cf
    } else {
        (hi.min(1.0) - lo.max(0.0)).max(0.0)
    }
}

/// P(p_L < p < p_U | X = x), marginal over the method's randomization.
pub fn coverage_given_x(spec: &MethodSpec, n: u64, x: u64, p: f64) -> Result<f64> {
    check_prob(p, "p")?;
    let sample = BinomialSample::new(n, x)?;
    let alpha = spec.alpha();
    let indicator = |covered: bool| if covered { 1.0 } else { 0.0 };
    match spec.method() {
        Method::Wilson => Ok(indicator(wilson(n, x as f64, alpha)?.contains(p))),
        Method::ClopperPearson => Ok(indicator(clopper_pearson(&sample, alpha)?.contains(p))),
        Method::MidP => Ok(indicator(mid_p(&sample, alpha)?.contains(p))),
        Method::SplitWilson => {
            let design = split_sample_sizes(n)?;
            let (lo, hi) = hypergeom_support(n, x, design.n1())?;
            let mut acc = 0.0;
            for z in lo..=hi {
                if split_sample_wilson(&sample, alpha, z)?.contains(p) {
                    acc += hypergeom_pmf_raw(n, x, design.n1(), z);
                }
            }
            Ok(acc.min(1.0))
        }
        Method::UNoiseWilson => {
            let (t_lo, t_hi) = wilson_y_window(&sample, alpha, p);
            Ok((t_hi.min(0.5) - t_lo.max(-0.5)).max(0.0))
        }
        Method::Stevens => {
            let (lo, hi) = stevens_nu_window(n, x, alpha, p);
            Ok((hi.min(1.0) - lo.max(0.0)).max(0.0))
        }
        Method::Korn => {
            let (lo, hi) = stevens_nu_window(n, x, alpha, p);
            Ok(lattice_fraction(lo, hi, &big_binom(n, x)))
        }
        Method::DataRandUWilson => {
            let (t_lo, t_hi) = wilson_y_window(&sample, alpha, p);
            Ok(lattice_fraction(t_lo + 0.5, t_hi + 0.5, &big_binom(n, x)))
        }
    }
}

/// Coverage at the true proportion p: the pmf-weighted sum of
/// [`coverage_given_x`] over x = 0..n.
pub fn coverage(spec: &MethodSpec, n: u64, p: f64) -> Result<f64> {
    check_prob(p, "p")?;
    if n == 0 {
        return Err(Error::Domain("coverage needs n >= 1".into()));
    }
    let mut acc = 0.0;
    for x in 0..=n {
        let w = binom_pmf_raw(n, p, x);
        if w > 0.0 {
            acc += w * coverage_given_x(spec, n, x, p)?;
        }
    }
    Ok(acc.min(1.0))
}

/// E[p_U - p_L | X = x] over the randomization, with the default
/// quadrature size.
pub fn conditional_expected_length(spec: &MethodSpec, n: u64, x: u64) -> Result<f64> {
    conditional_expected_length_with_nodes(spec, n, x, DEFAULT_QUADRATURE_NODES)
}

/// Same as [`conditional_expected_length`] with an explicit Gauss-Legendre
/// node count, for convergence checks.
pub fn conditional_expected_length_with_nodes(
    spec: &MethodSpec,
    n: u64,
    x: u64,
    nodes: usize,
) -> Result<f64> {
    let sample = BinomialSample::new(n, x)?;
    let alpha = spec.alpha();
    match spec.method() {
        Method::Wilson => Ok(wilson(n, x as f64, alpha)?.length()),
        Method::ClopperPearson => Ok(clopper_pearson(&sample, alpha)?.length()),
        Method::MidP => Ok(mid_p(&sample, alpha)?.length()),
        Method::SplitWilson => {
            let design = split_sample_sizes(n)?;
            let (lo, hi) = hypergeom_support(n, x, design.n1())?;
            let mut acc = 0.0;
            for z in lo..=hi {
                acc += hypergeom_pmf_raw(n, x, design.n1(), z)
                    * split_sample_wilson(&sample, alpha, z)?.length();
            }
            Ok(acc)
        }
        Method::UNoiseWilson => {
            let rule = GaussLegendre::new(nodes);
            let len = |y: f64| {
                u_noise_wilson(&sample, alpha, y)
                    .expect("y within [-1/2, 1/2]")
                    .length()
            };
            // the clamp of x + y makes the integrand flat on one side of
            // y = 0 at the boundary counts; integrate the flat side exactly
            if x == 0 {
                Ok(0.5 * len(0.0) + rule.integrate(0.0, 0.5, len))
            } else if x == n {
                Ok(rule.integrate(-0.5, 0.0, len) + 0.5 * len(0.0))
            } else {
                Ok(rule.integrate(-0.5, 0.5, len))
            }
        }
        Method::Stevens => {
            let rule = GaussLegendre::new(nodes);
            let len = |nu: f64| {
                stevens(&sample, alpha, nu, 1.0 - nu)
                    .expect("nu within [0, 1]")
                    .length()
            };
            // at x = 0 and x = n the bound formulas switch branches at
            // nu = alpha/2 and nu = 1 - alpha/2; split the integral there
            if x == 0 || x == n {
                let a = alpha / 2.0;
                Ok(rule.integrate(0.0, a, len)
                    + rule.integrate(a, 1.0 - a, len)
                    + rule.integrate(1.0 - a, 1.0, len))
            } else {
                Ok(rule.integrate(0.0, 1.0, len))
            }
        }
        Method::Korn | Method::DataRandUWilson => {
            let len_at = |u: f64| -> f64 {
                match spec.method() {
                    Method::Korn => stevens(&sample, alpha, u, 1.0 - u)
                        .expect("u within (0, 1]")
                        .length(),
                    _ => u_noise_wilson(&sample, alpha, u - 0.5)
                        .expect("u within (0, 1]")
                        .length(),
                }
            };
            let total = big_binom(n, x);
            match total.to_u64().filter(|&c| c <= EXACT_LATTICE_LIMIT) {
                Some(c) => {
                    let cf = c as f64;
                    let mut acc = 0.0;
                    for k in 1..=c {
                        acc += len_at(k as f64 / cf);
                    }
                    Ok(acc / cf)
                }
                // a lattice this fine is indistinguishable from the
                // continuous average; x is then interior, so no kinks
                None => Ok(GaussLegendre::new(nodes).integrate(0.0, 1.0, len_at)),
            }
        }
    }
}

/// E[p_U - p_L] at the true proportion p.
pub fn expected_length(spec: &MethodSpec, n: u64, p: f64) -> Result<f64> {
    let profile = length_profile(spec, n)?;
    expected_length_from_profile(n, p, &profile)
}

/// Conditional expected lengths for every x = 0..n. The lengths do not
/// depend on p, so sweeps should compute this once and reuse it.
pub fn length_profile(spec: &MethodSpec, n: u64) -> Result<Vec<f64>> {
    (0..=n)
        .map(|x| conditional_expected_length(spec, n, x))
        .collect()
}

/// pmf-weighted combination of a precomputed length profile.
pub fn expected_length_from_profile(n: u64, p: f64, profile: &[f64]) -> Result<f64> {
    check_prob(p, "p")?;
    if profile.len() != n as usize + 1 {
        return Err(Error::Domain(format!(
            "profile has {} entries, expected {}",
            profile.len(),
            n + 1
        )));
    }
    Ok(profile
        .iter()
        .enumerate()
        .map(|(x, len)| binom_pmf_raw(n, p, x as u64) * len)
        .sum())
}

/// Coverage and expected length at one p.
pub fn evaluate(spec: &MethodSpec, n: u64, p: f64) -> Result<EvaluationPoint> {
    Ok(EvaluationPoint {
        p,
        coverage: coverage(spec, n, p)?,
        expected_length: expected_length(spec, n, p)?,
    })
}

/// Extremes of the upper bound over the whole randomization domain at
/// fixed data (n, x). Errors for non-randomized methods.
pub fn upper_bound_range(spec: &MethodSpec, n: u64, x: u64) -> Result<BoundRange> {
    let sample = BinomialSample::new(n, x)?;
    let alpha = spec.alpha();
    match spec.method() {
        Method::Wilson | Method::ClopperPearson | Method::MidP => Err(Error::Domain(format!(
            "method {} is not randomized, its bounds have no range",
            spec.method().name()
        ))),
        Method::SplitWilson => {
            let design = split_sample_sizes(n)?;
            let (lo, hi) = hypergeom_support(n, x, design.n1())?;
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            let mut prev = f64::INFINITY;
            for z in lo..=hi {
                let u = split_sample_wilson(&sample, alpha, z)?.upper();
                // Eq-(1) weights make the upper bound nonincreasing in z;
                // scan the whole support rather than trusting that
                debug_assert!(u <= prev + 1e-12, "upper bound not monotone in z");
                prev = u;
                min = min.min(u);
                max = max.max(u);
            }
            BoundRange::new(min, max)
        }
        Method::UNoiseWilson => {
            let a = u_noise_wilson(&sample, alpha, -0.5)?.upper();
            let b = u_noise_wilson(&sample, alpha, 0.5)?.upper();
            BoundRange::new(a.min(b), a.max(b))
        }
        Method::Stevens => {
            // the upper bound is increasing in nu2; the nu domain is closed
            let a = stevens(&sample, alpha, 1.0, 0.0)?.upper();
            let b = stevens(&sample, alpha, 1.0, 1.0)?.upper();
            BoundRange::new(a.min(b), a.max(b))
        }
        Method::Korn => {
            let total = big_binom(n, x);
            let u_min = 1.0 / total.to_f64().unwrap_or(f64::INFINITY).max(1.0);
            let a = stevens(&sample, alpha, u_min, 1.0 - u_min)?.upper();
            let b = stevens(&sample, alpha, 1.0, 0.0)?.upper();
            BoundRange::new(a.min(b), a.max(b))
        }
        Method::DataRandUWilson => {
            let total = big_binom(n, x);
            let u_min = 1.0 / total.to_f64().unwrap_or(f64::INFINITY).max(1.0);
            let a = u_noise_wilson(&sample, alpha, u_min - 0.5)?.upper();
            let b = u_noise_wilson(&sample, alpha, 0.5)?.upper();
            BoundRange::new(a.min(b), a.max(b))
        }
    }
}

/// Number of distinct randomization outcomes at a given n: distinct
/// effective counts for the split method (exact integer arithmetic, no
/// float collisions), and the full 2^n rank count for the Korn algorithm.
pub fn distinct_value_count(n: u64) -> Result<DistinctValueCount> {
    let design = split_sample_sizes(n)?;
    let (n1, n2) = (design.n1() as i128, design.n2() as i128);
    // x̃ = n (n1 x - (n1 - n2) z) / (2 n1 n2); the prefactor is constant,
    // so distinct numerators are distinct values
    let mut seen: HashSet<i128> = HashSet::new();
    for x in 0..=n {
        let (lo, hi) = hypergeom_support(n, x, design.n1())?;
        for z in lo..=hi {
            seen.insert(n1 * x as i128 - (n1 - n2) * z as i128);
        }
    }
    Ok(DistinctValueCount {
        split: seen.len() as u64,
        korn: BigUint::one() << n,
    })
}

//! Numerically stable binomial and hypergeometric primitives.
//!
//! Probabilities are assembled in log space and exponentiated once at the
//! end. Tail probabilities are always computed by summing the terms of the
//! tail being reported, never as `1 - other_tail`, so there is no
//! cancellation to worry about. Conventions: `0^0 = 1`, so the pmf is
//! well-defined at `p = 0` and `p = 1`, and the lower-tail cdf at `k = -1`
//! is 0 (the empty sum).

use crate::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// ln Γ(x) - [(x - 1/2) ln x - x + ln √(2π)], valid for x ≥ 16.
///
/// Six-term Stirling series; the first omitted term is below 1e-18 at
/// x = 16, so this is exact to double precision on its domain.
fn stirlerr(x: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    const S5: f64 = 691.0 / 360_360.0;
    let xx = x * x;
    (S0 - (S1 - (S2 - (S3 - (S4 - S5 / xx) / xx) / xx) / xx) / xx) / x
}

/// ln C(n, m) for small m = min(k, n-k), as a sum of logs of exact ratios.
fn ln_binom_direct(n: u64, m: u64) -> f64 {
    let mut acc = 0.0;
    for i in 1..=m {
        acc += ((n - m + i) as f64 / i as f64).ln();
    }
    acc
}

pub(crate) fn ln_binom_raw(n: u64, k: u64) -> f64 {
    let m = k.min(n - k);
    if m == 0 {
        return 0.0;
    }
    if m < 16 {
        return ln_binom_direct(n, m);
    }
    // ln C(n,k) = -ln(n+1) - ln B(m+1, n-m+1), with the log-beta expanded
    // through stirlerr so that no large lgamma values are subtracted.
    let a = (m + 1) as f64;
    let b = (n - m + 1) as f64;
    let corr = stirlerr(a) + stirlerr(b) - stirlerr(a + b);
    let u = a / (a + b);
    let ln_beta =
        LN_SQRT_2PI - 0.5 * (a + b).ln() + corr + (a - 0.5) * u.ln() + (b - 0.5) * (-u).ln_1p();
    -((n as f64 + 1.0).ln()) - ln_beta
}

/// Natural log of the binomial coefficient C(n, k).
pub fn log_binom_coeff(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!(
            "log_binom_coeff: k = {k} outside [0, {n}]"
        )));
    }
    Ok(ln_binom_raw(n, k))
}

fn check_p(p: f64) -> Result<()> {
    if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

pub(crate) fn binom_pmf_raw(n: u64, p: f64, k: u64) -> f64 {
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln = ln_binom_raw(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p();
    ln.exp()
}

/// Binomial pmf P(X = k) for X ~ Bin(n, p).
pub fn binom_pmf(n: u64, p: f64, k: u64) -> Result<f64> {
    check_p(p)?;
    if k > n {
        return Err(Error::Domain(format!(
            "binom_pmf: k = {k} outside [0, {n}]"
        )));
    }
    Ok(binom_pmf_raw(n, p, k))
}

/// Sum of pmf terms over the inclusive range [a, b], accumulated outward
/// from the largest term by the ratio recurrence. Starting at the in-range
/// mode means the seed term can only underflow when the whole sum does.
fn sum_pmf_range(n: u64, p: f64, a: u64, b: u64) -> f64 {
    debug_assert!(a <= b && b <= n);
    if p == 0.0 {
        return if a == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if b == n { 1.0 } else { 0.0 };
    }
    let q = 1.0 - p;
    let mode = (((n + 1) as f64) * p).floor() as u64;
    let m = mode.clamp(a, b);
    let seed = binom_pmf_raw(n, p, m);
    let mut acc = seed;
    let mut t = seed;
    let mut j = m;
    while j > a {
        t *= (j as f64 / (n - j + 1) as f64) * (q / p);
        acc += t;
        j -= 1;
    }
    t = seed;
    j = m;
    while j < b {
        t *= ((n - j) as f64 / (j + 1) as f64) * (p / q);
        acc += t;
        j += 1;
    }
    acc
}

/// Sum of pmf terms j = 0..=k; k may be -1 (empty sum).
pub(crate) fn binom_cdf_raw(n: u64, p: f64, k: i64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    sum_pmf_range(n, p, 0, (k as u64).min(n)).min(1.0)
}

/// Sum of pmf terms j = k+1..=n.
pub(crate) fn binom_sf_raw(n: u64, p: f64, k: i64) -> f64 {
    if k >= n as i64 {
        return 0.0;
    }
    let start = if k < 0 { 0 } else { k as u64 + 1 };
    sum_pmf_range(n, p, start, n).min(1.0)
}

/// Lower-tail cdf P(X ≤ k) for X ~ Bin(n, p), with k ∈ [-1, n].
pub fn binom_cdf(n: u64, p: f64, k: i64) -> Result<f64> {
    check_p(p)?;
    if k < -1 || k > n as i64 {
        return Err(Error::Domain(format!(
            "binom_cdf: k = {k} outside [-1, {n}]"
        )));
    }
    Ok(binom_cdf_raw(n, p, k))
}

/// Upper tail P(X > k) for X ~ Bin(n, p), summed directly (never 1 - cdf).
pub fn binom_sf(n: u64, p: f64, k: i64) -> Result<f64> {
    check_p(p)?;
    if k < -1 || k > n as i64 {
        return Err(Error::Domain(format!(
            "binom_sf: k = {k} outside [-1, {n}]"
        )));
    }
    Ok(binom_sf_raw(n, p, k))
}

/// Support of Z | X ~ Hypergeometric(n, x, n1): the inclusive range of the
/// number of successes landing in a subsample of size n1.
pub fn hypergeom_support(n: u64, x: u64, n1: u64) -> Result<(u64, u64)> {
    if n1 == 0 || n1 >= n {
        return Err(Error::Domain(format!(
            "hypergeom_support: n1 = {n1} outside [1, {}]",
            n - 1
        )));
    }
    if x > n {
        return Err(Error::Domain(format!(
            "hypergeom_support: x = {x} outside [0, {n}]"
        )));
    }
    Ok((x.saturating_sub(n - n1), x.min(n1)))
}

pub(crate) fn hypergeom_pmf_raw(n: u64, x: u64, n1: u64, z: u64) -> f64 {
    let lo = x.saturating_sub(n - n1);
    let hi = x.min(n1);
    if z < lo || z > hi {
        return 0.0;
    }
    (ln_binom_raw(x, z) + ln_binom_raw(n - x, n1 - z) - ln_binom_raw(n, n1)).exp()
}

/// Hypergeometric pmf P(Z = z) = C(x, z) C(n-x, n1-z) / C(n, n1).
///
/// Returns 0 for z outside the support.
pub fn hypergeom_pmf(n: u64, x: u64, n1: u64, z: u64) -> Result<f64> {
    hypergeom_support(n, x, n1)?;
    Ok(hypergeom_pmf_raw(n, x, n1, z))
}

/// Standard normal cdf Φ(z), via erfc so both tails keep full precision.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

// Acklam's rational approximation of Φ^{-1} on (0, 0.5]; |rel err| < 1.2e-9.
fn acklam_half(q: f64) -> f64 {
    const A: [f64; 6] = [
        -39.696_830_286_653_8,
        220.946_098_424_521,
        -275.928_510_446_969,
        138.357_751_867_269,
        -30.664_798_066_147_2,
        2.506_628_277_459_24,
    ];
    const B: [f64; 5] = [
        -54.476_098_798_224_1,
        161.585_836_858_041,
        -155.698_979_859_887,
        66.801_311_887_719_7,
        -13.280_681_552_885_7,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_29e-3,
        -0.322_396_458_041_136,
        -2.400_758_277_161_84,
        -2.549_732_539_343_73,
        4.374_664_141_464_97,
        2.938_163_982_698_78,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_46e-3,
        0.322_467_129_070_04,
        2.445_134_137_143,
        3.754_408_661_907_42,
    ];
    if q < 0.02425 {
        let t = (-2.0 * q.ln()).sqrt();
        (((((C[0] * t + C[1]) * t + C[2]) * t + C[3]) * t + C[4]) * t + C[5])
            / ((((D[0] * t + D[1]) * t + D[2]) * t + D[3]) * t + 1.0)
    } else {
        let t = q - 0.5;
        let r = t * t;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * t
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

fn quantile_half(q: f64) -> f64 {
    let z = acklam_half(q);
    // one Newton step against the erfc-based cdf
    let pdf = (-0.5 * z * z).exp() / SQRT_2PI;
    if pdf > 0.0 {
        let step = (normal_cdf(z) - q) / pdf;
        if step.is_finite() {
            return z - step;
        }
    }
    z
}

/// Standard normal quantile Φ^{-1}(q) for q in the open interval (0, 1).
///
/// Evaluated on (0, 1/2] and reflected about q = 1/2, keeping the two
/// halves symmetric to within the rounding of 1 - q itself.
pub fn normal_quantile(q: f64) -> Result<f64> {
    if !(q.is_finite() && q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!(
            "normal_quantile: q = {q} outside (0, 1)"
        )));
    }
    if q == 0.5 {
        Ok(0.0)
    } else if q > 0.5 {
        Ok(-quantile_half(1.0 - q))
    } else {
        Ok(quantile_half(q))
    }
}

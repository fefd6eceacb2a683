//! Seeded draws from each method's external randomization source.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use lattice_ci::dist::{hypergeom_pmf, hypergeom_support};
use lattice_ci::intervals::{split_sample_sizes, BinomialSample, Method, MethodSpec};
use lattice_ci::{Error, RandomizationDraw, Result};

/// Identifier of the PRNG behind [`draw_randomization`]; emitted in the
/// CSV so results are auditable.
pub const RNG_ALGORITHM: &str = "chacha12";

/// One deterministic draw from the method's randomization distribution:
/// hypergeometric Z | X by inverse cdf over the exact pmf, uniform noise
/// on [-1/2, 1/2], or uniform ν₁ on (0, 1].
pub fn draw_randomization(
    spec: &MethodSpec,
    sample: &BinomialSample,
    seed: u64,
) -> Result<RandomizationDraw> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    match spec.method() {
        Method::SplitWilson => {
            let design = split_sample_sizes(sample.n())?;
            let (lo, hi) = hypergeom_support(sample.n(), sample.x(), design.n1())?;
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut z = hi;
            for candidate in lo..=hi {
                acc += hypergeom_pmf(sample.n(), sample.x(), design.n1(), candidate)?;
                if u < acc {
                    z = candidate;
                    break;
                }
            }
            Ok(RandomizationDraw::HypergeometricZ(z))
        }
        Method::UNoiseWilson => Ok(RandomizationDraw::UniformNoise(rng.gen::<f64>() - 0.5)),
        Method::Stevens => Ok(RandomizationDraw::StevensNu(1.0 - rng.gen::<f64>())),
        other => Err(Error::Domain(format!(
            "method {} takes no external randomization",
            other.name()
        ))),
    }
}

//! Plain Monte Carlo estimate of the null mass of a ratio bin: draw fresh
//! interval pairs from the null, transform each pair, and count how many land
//! in the closed bin `[u, v]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::null_models::NullModel;
use crate::parallel::map_indexed;
use crate::ratio::RatioTransform;
use crate::rng::seeded_rng;

pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// Fraction of draws inside the bin.
    pub mass: f64,
    pub n: u64,
    pub hits: u64,
    /// Binomial standard error `sqrt(mass (1 - mass) / n)`.
    pub std_error: f64,
    pub seed: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, n: u64, seed: u64) -> Self {
        let mass = hits as f64 / n as f64;
        Self {
            mass,
            n,
            hits,
            std_error: (mass * (1.0 - mass) / n as f64).sqrt(),
            seed,
        }
    }
}

fn check_bins(transform: &RatioTransform, bins: &[(f64, f64)], n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("Monte Carlo sample count must be >= 1"));
    }
    let (lo, hi) = transform.codomain();
    for &(u, v) in bins {
        if !(u < v) || u < lo || v > hi || u.is_nan() || v.is_nan() {
            return Err(Error::domain(format!(
                "bin [{u}, {v}] must satisfy {lo} <= u < v <= {hi} for transform {transform}"
            )));
        }
    }
    Ok(())
}

fn count_hits(
    model: &NullModel,
    transform: &RatioTransform,
    bins: &[(f64, f64)],
    n: u64,
    seed: u64,
    stream: u64,
) -> Vec<u64> {
    let mut rng = seeded_rng(seed, stream);
    let mut hits = vec![0u64; bins.len()];
    for _ in 0..n {
        let i1 = model.sample(&mut rng);
        let i2 = model.sample(&mut rng);
        let s = transform.apply_unchecked(i1, i2);
        for (h, &(u, v)) in hits.iter_mut().zip(bins) {
            if u <= s && s <= v {
                *h += 1;
            }
        }
    }
    hits
}

/// Estimates the null mass of `[u, v]` from `n` pairs drawn on stream 0 of `seed`.
pub fn mc_bin_mass(
    model: &NullModel,
    transform: &RatioTransform,
    u: f64,
    v: f64,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    Ok(mc_bin_masses(model, transform, &[(u, v)], n, seed)?[0])
}

/// Estimates several bins from one shared sample stream, so adjacent bins
/// add up exactly as their union would.
pub fn mc_bin_masses(
    model: &NullModel,
    transform: &RatioTransform,
    bins: &[(f64, f64)],
    n: u64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    model.validate()?;
    check_bins(transform, bins, n)?;
    Ok(count_hits(model, transform, bins, n, seed, 0)
        .into_iter()
        .map(|h| McEstimate::from_hits(h, n, seed))
        .collect())
}

/// Splits the `n` draws over `chunks` workers. Chunk `k` uses stream `k + 1`
/// of `seed`; hit counts are summed, so the result does not depend on
/// scheduling.
pub fn mc_bin_mass_chunked(
    model: &NullModel,
    transform: &RatioTransform,
    u: f64,
    v: f64,
    n: u64,
    seed: u64,
    chunks: usize,
) -> Result<McEstimate> {
    model.validate()?;
    check_bins(transform, &[(u, v)], n)?;
    if chunks == 0 {
        return Err(Error::domain("chunk count must be >= 1"));
    }
    let chunks = chunks.min(n as usize);
    let base = n / chunks as u64;
    let extra = n % chunks as u64;
    let hits: u64 = map_indexed(chunks, |k| {
        let size = base + u64::from((k as u64) < extra);
        count_hits(model, transform, &[(u, v)], size, seed, k as u64 + 1)[0]
    })
    .into_iter()
    .sum();
    Ok(McEstimate::from_hits(hits, n, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_range_has_unit_mass() {
        let m = NullModel::exponential(1.0).unwrap();
        for n in [1, 17, 1000] {
            let e = mc_bin_mass(&m, &RatioTransform::StandardR, 0.0, 1.0, n, 3).unwrap();
            assert_eq!(e.mass, 1.0);
            assert_eq!(e.std_error, 0.0);
        }
    }

    #[test]
    fn flat_poisson_bin() {
        let m = NullModel::exponential(1.0).unwrap();
        let e = mc_bin_mass(
            &m,
            &RatioTransform::StandardR,
            0.4,
            4.0 / 9.0,
            1_000_000,
            21,
        )
        .unwrap();
        assert!((e.mass - 2.0 / 45.0).abs() <= 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn uniform_on_bin() {
        let m = NullModel::uniform(0.0, 1.0).unwrap();
        let e = mc_bin_mass(&m, &RatioTransform::StandardR, 4.0 / 9.0, 0.5, 1_000_000, 8).unwrap();
        assert!((e.mass - 0.1).abs() <= 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn invalid_requests() {
        let m = NullModel::exponential(1.0).unwrap();
        let r = RatioTransform::StandardR;
        assert!(mc_bin_mass(&m, &r, 0.5, 0.4, 10, 0).is_err());
        assert!(mc_bin_mass(&m, &r, 0.4, 1.5, 10, 0).is_err());
        assert!(mc_bin_mass(&m, &r, 0.4, 0.5, 0, 0).is_err());
        assert!(mc_bin_mass(&m, &RatioTransform::FractionQ, 0.4, 5.0, 10, 0).is_ok());
    }

    #[test]
    fn deterministic_per_seed() {
        let m = NullModel::half_normal(1.0).unwrap();
        let r = RatioTransform::StandardR;
        let a = mc_bin_mass(&m, &r, 0.3, 0.5, 50_000, 99).unwrap();
        let b = mc_bin_mass(&m, &r, 0.3, 0.5, 50_000, 99).unwrap();
        assert_eq!(a, b);
        let c = mc_bin_mass_chunked(&m, &r, 0.3, 0.5, 50_000, 99, 7).unwrap();
        let d = mc_bin_mass_chunked(&m, &r, 0.3, 0.5, 50_000, 99, 7).unwrap();
        assert_eq!(c, d);
        assert_eq!(c.n, 50_000);
    }

    #[test]
    fn shared_stream_is_additive() {
        let m = NullModel::uniform(0.0, 1.0).unwrap();
        let est = mc_bin_masses(
            &m,
            &RatioTransform::StandardR,
            &[(0.4, 0.45), (0.45, 0.5), (0.4, 0.5)],
            200_000,
            5,
        )
        .unwrap();
        let combined = (est[0].std_error.powi(2) + est[1].std_error.powi(2)).sqrt();
        assert!((est[0].mass + est[1].mass - est[2].mass).abs() <= 3.0 * combined);
    }
}

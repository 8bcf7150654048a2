//! One-sample two-sided Kolmogorov-Smirnov test with the asymptotic
//! Kolmogorov distribution for the p-value.

use std::f64::consts::{LN_10, LN_2, PI};

use serde_json::json;

use super::report::{TestMethod, TestReport};
use crate::error::{Error, Result};

pub const MIN_KS_SAMPLES: usize = 5;

// slack allowed when probing a user-supplied CDF for monotonicity and range
const PROBE_TOL: f64 = 1e-9;

/// `D = sup |F_n - F|` for a sample already sorted ascending and its null CDF values.
pub fn ks_statistic(sorted_cdf_values: &[f64]) -> f64 {
    let n = sorted_cdf_values.len() as f64;
    sorted_cdf_values
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let i = i as f64;
            ((i + 1.0) / n - f).max(f - i / n)
        })
        .fold(0.0, f64::max)
}

/// Survival function of the Kolmogorov distribution, `P(K > lambda)`,
/// returned as `(p, log10 p)`.
pub fn kolmogorov_sf(lambda: f64) -> (f64, f64) {
    if !(lambda > 0.0) {
        return (1.0, 0.0);
    }
    if lambda < 1.0 {
        // theta-function form, fast for small lambda
        let mut cdf = 0.0;
        for k in 1..=20 {
            let j = (2 * k - 1) as f64;
            cdf += (-(j * j) * PI * PI / (8.0 * lambda * lambda)).exp();
        }
        cdf *= (2.0 * PI).sqrt() / lambda;
        let p = (1.0 - cdf).clamp(0.0, 1.0);
        return (p, p.log10());
    }
    // 2 sum (-1)^(k-1) exp(-2 k^2 l^2), factored as 2 e^{-2 l^2} (1 - e^{-6 l^2} + ...)
    let l2 = lambda * lambda;
    let mut tail = 1.0;
    for k in 2..=100 {
        let kf = k as f64;
        let term = (-2.0 * (kf * kf - 1.0) * l2).exp();
        if term < 1e-18 {
            break;
        }
        tail += if k % 2 == 0 { -term } else { term };
    }
    let ln_p = LN_2 - 2.0 * l2 + tail.ln();
    let log10_p = (ln_p / LN_10).min(0.0);
    (10f64.powf(log10_p), log10_p)
}

/// Tests `ratios` against the continuous null CDF `null_cdf`.
pub fn ks_test<F>(ratios: &[f64], null_cdf: F) -> Result<TestReport>
where
    F: Fn(f64) -> Result<f64>,
{
    if ratios.len() < MIN_KS_SAMPLES {
        return Err(Error::invalid(format!(
            "KS test needs at least {MIN_KS_SAMPLES} values, got {}",
            ratios.len()
        )));
    }
    if ratios.iter().any(|r| r.is_nan()) {
        return Err(Error::invalid("KS input contains NaN"));
    }
    let mut sorted = ratios.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mut values = Vec::with_capacity(sorted.len());
    let mut prev = 0.0;
    for &x in &sorted {
        let f = null_cdf(x)?;
        if !(-PROBE_TOL..=1.0 + PROBE_TOL).contains(&f) {
            return Err(Error::domain(format!(
                "null CDF returned {f} at {x}, outside [0, 1]"
            )));
        }
        if f < prev - PROBE_TOL {
            return Err(Error::domain(format!(
                "null CDF decreases at {x} ({prev} -> {f})"
            )));
        }
        prev = f.max(prev);
        values.push(f.clamp(0.0, 1.0));
    }

    let d = ks_statistic(&values);
    let sqrt_n = (sorted.len() as f64).sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    let (_, log10_p) = kolmogorov_sf(lambda);
    Ok(
        TestReport::new(TestMethod::KolmogorovSmirnov, d, sorted.len(), log10_p)
            .with_meta("lambda", json!(lambda)),
    )
}

//! Wilcoxon signed-rank test on paired values.
//!
//! Differences `on - off` equal to zero are dropped, the rest ranked by
//! absolute value with average ranks for ties. `T = min(W+, W-)`. Up to
//! [`EXACT_MAX_N`] usable pairs the two-sided p-value comes from the exact
//! null distribution of `W+` (all `2^n` sign assignments, counted by dynamic
//! programming); above that from the normal approximation with tie-corrected
//! variance and continuity correction.

use serde_json::json;

use super::report::{TestMethod, TestReport};
use super::tails::log10_two_sided_normal;
use crate::error::{Error, Result};

pub const MIN_USABLE_PAIRS: usize = 5;
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct SignedRanks {
    /// Average ranks of `|d|`, one per non-zero difference.
    pub ranks: Vec<f64>,
    pub positive: Vec<bool>,
    /// Sizes of groups of tied `|d|`.
    pub tie_sizes: Vec<usize>,
    pub dropped_zeros: usize,
}

impl SignedRanks {
    pub fn n(&self) -> usize {
        self.ranks.len()
    }

    pub fn w_plus(&self) -> f64 {
        self.ranks
            .iter()
            .zip(&self.positive)
            .filter(|(_, &p)| p)
            .map(|(r, _)| r)
            .sum()
    }

    pub fn w_minus(&self) -> f64 {
        self.ranks
            .iter()
            .zip(&self.positive)
            .filter(|(_, &p)| !p)
            .map(|(r, _)| r)
            .sum()
    }
}

pub fn signed_ranks(differences: &[f64]) -> Result<SignedRanks> {
    if differences.iter().any(|d| !d.is_finite()) {
        return Err(Error::invalid("differences must be finite"));
    }
    let mut kept: Vec<f64> = differences.iter().copied().filter(|&d| d != 0.0).collect();
    let dropped_zeros = differences.len() - kept.len();
    kept.sort_by(|a, b| a.abs().total_cmp(&b.abs()));

    let mut ranks = vec![0.0; kept.len()];
    let mut tie_sizes = Vec::new();
    let mut start = 0;
    while start < kept.len() {
        let mut end = start + 1;
        while end < kept.len() && kept[end].abs() == kept[start].abs() {
            end += 1;
        }
        // ranks start..end (1-based start+1..=end) share their mean
        let avg = (start + 1 + end) as f64 / 2.0;
        ranks[start..end].iter_mut().for_each(|r| *r = avg);
        if end - start > 1 {
            tie_sizes.push(end - start);
        }
        start = end;
    }
    Ok(SignedRanks {
        ranks,
        positive: kept.iter().map(|&d| d > 0.0).collect(),
        tie_sizes,
        dropped_zeros,
    })
}

/// Exact two-sided p-value `min(1, 2 P(W+ <= t))` given the (possibly tied)
/// ranks, where `t = min(W+, W-)`.
pub fn wilcoxon_exact_p(ranks: &[f64], t: f64) -> f64 {
    // average ranks are multiples of 1/2, so doubled ranks are integers
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut ways = vec![0u64; total + 1];
    ways[0] = 1;
    let mut reach = 0;
    for &r in &doubled {
        reach += r;
        for s in (r..=reach).rev() {
            ways[s] += ways[s - r];
        }
    }
    let limit = ((2.0 * t).round() as usize).min(total);
    let below: u64 = ways[..=limit].iter().sum();
    let p = 2.0 * below as f64 / 2f64.powi(ranks.len() as i32);
    p.min(1.0)
}

/// Normal approximation: returns `(z, log10 p)` for `n` ranks with tie
/// groups `tie_sizes` and statistic `t = min(W+, W-)`.
pub fn wilcoxon_normal_p(n: usize, tie_sizes: &[usize], t: f64) -> (f64, f64) {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let ties: f64 = tie_sizes.iter().map(|&g| (g * g * g - g) as f64).sum();
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - ties / 48.0;
    if !(var > 0.0) {
        return (0.0, 0.0);
    }
    // continuity correction toward the mean
    let shift = (mean - t - 0.5).max(0.0);
    let z = -shift / var.sqrt();
    (z, log10_two_sided_normal(z))
}

/// Paired test on `(on_value, off_value)`.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<TestReport> {
    let d: Vec<f64> = pairs.iter().map(|(on, off)| on - off).collect();
    let sr = signed_ranks(&d)?;
    let n = sr.n();
    if n < MIN_USABLE_PAIRS {
        return Err(Error::invalid(format!(
            "Wilcoxon test needs at least {MIN_USABLE_PAIRS} non-zero differences, got {n} ({} zero)",
            sr.dropped_zeros
        )));
    }
    let (w_plus, w_minus) = (sr.w_plus(), sr.w_minus());
    let t = w_plus.min(w_minus);

    let report = if n <= EXACT_MAX_N {
        let p = wilcoxon_exact_p(&sr.ranks, t);
        TestReport::new(TestMethod::WilcoxonSignedRank, t, n, p.log10())
            .with_meta("approximation", "exact")
    } else {
        let (z, log10_p) = wilcoxon_normal_p(n, &sr.tie_sizes, t);
        TestReport::new(TestMethod::WilcoxonSignedRank, t, n, log10_p)
            .with_meta("approximation", "normal")
            .with_meta("z", z)
    };
    Ok(report
        .with_meta("w_plus", w_plus)
        .with_meta("w_minus", w_minus)
        .with_meta("n_dropped_zero", json!(sr.dropped_zeros))
        .with_meta("n_pairs", json!(pairs.len()))
        .with_meta("tie_groups", json!(sr.tie_sizes.len())))
}

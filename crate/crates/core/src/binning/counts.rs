//! Bin counts and their normalization against a null.
//!
//! A bin holding `m` of `N` ratios gets the value `m / (N * w)`. With `w`
//! the bin width this compares the data to a flat ratio density (a Poisson
//! null for the rhythm ratio); with `w` the null's probability mass of the
//! bin it compares the data to that null instead.

use std::sync::Arc;

use serde::Serialize;

use super::layout::{BinLayout, BinRole};
use crate::error::{Error, Result};
use crate::null_models::RatioDistribution;
use crate::numerics::{mc_bin_masses, McEstimate};
use crate::ratio::RatioTransform;

/// Raw per-bin counts. `total` includes ratios outside the layout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinCounts {
    pub counts: Vec<u64>,
    pub total: u64,
}

pub fn count_bins(ratios: &[f64], layout: &BinLayout) -> Result<BinCounts> {
    if ratios.is_empty() {
        return Err(Error::invalid("no ratios to count"));
    }
    if let Some(bad) = ratios.iter().find(|r| !(**r >= 0.0 && **r <= 1.0)) {
        return Err(Error::domain(format!("ratio {bad} outside [0, 1]")));
    }
    let mut counts = vec![0u64; layout.len()];
    for &r in ratios {
        if let Some(k) = layout.locate(r) {
            counts[k] += 1;
        }
    }
    Ok(BinCounts {
        counts,
        total: ratios.len() as u64,
    })
}

#[derive(Debug, Clone)]
pub enum MassMethod {
    Analytic,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone)]
pub enum Normalizer {
    BinWidth,
    /// Null mass of each bin in the space of `transform`.
    ModelMass {
        dist: Arc<RatioDistribution>,
        transform: RatioTransform,
        method: MassMethod,
    },
}

/// Per-bin normalizers resolved for one layout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinNormalizers {
    pub method: String,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<Vec<McEstimate>>,
}

impl Normalizer {
    pub fn resolve(&self, layout: &BinLayout) -> Result<BinNormalizers> {
        match self {
            Normalizer::BinWidth => Ok(BinNormalizers {
                method: "width".into(),
                values: layout.bins().map(|b| b.width()).collect(),
                monte_carlo: None,
            }),
            Normalizer::ModelMass {
                dist,
                transform,
                method: MassMethod::Analytic,
            } => Ok(BinNormalizers {
                method: format!("mass[{}]", dist.model().label()),
                values: layout
                    .bins()
                    .map(|b| dist.bin_mass_analytic(transform, b.lo, b.hi))
                    .collect::<Result<_>>()?,
                monte_carlo: None,
            }),
            Normalizer::ModelMass {
                dist,
                transform,
                method: MassMethod::MonteCarlo { samples, seed },
            } => {
                let bins: Vec<(f64, f64)> = layout.bins().map(|b| (b.lo, b.hi)).collect();
                let est = mc_bin_masses(dist.model(), transform, &bins, *samples, *seed)?;
                Ok(BinNormalizers {
                    method: format!("mass-mc[{}]", dist.model().label()),
                    values: est.iter().map(|e| e.mass).collect(),
                    monte_carlo: Some(est),
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizedBin {
    pub lo: f64,
    pub hi: f64,
    pub role: BinRole,
    pub count: u64,
    pub normalizer: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedCounts {
    pub bins: Vec<NormalizedBin>,
    pub total: u64,
}

pub fn normalize_counts(
    counts: &BinCounts,
    layout: &BinLayout,
    normalizers: &BinNormalizers,
) -> Result<NormalizedCounts> {
    if counts.counts.len() != layout.len() || normalizers.values.len() != layout.len() {
        return Err(Error::invalid(
            "counts, normalizers and layout disagree on the number of bins",
        ));
    }
    if counts.total == 0 {
        return Err(Error::invalid("cannot normalize an empty count"));
    }
    let n = counts.total as f64;
    let bins = layout
        .bins()
        .zip(&counts.counts)
        .zip(&normalizers.values)
        .map(|((bin, &count), &w)| {
            if !(w > 0.0) {
                return Err(Error::domain(format!(
                    "bin [{}, {}] has normalizer {w}; the null puts no mass there",
                    bin.lo, bin.hi
                )));
            }
            Ok(NormalizedBin {
                lo: bin.lo,
                hi: bin.hi,
                role: bin.role,
                count,
                normalizer: w,
                value: count as f64 / (n * w),
            })
        })
        .collect::<Result<_>>()?;
    Ok(NormalizedCounts {
        bins,
        total: counts.total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZoneValue {
    pub count: u64,
    pub normalizer: f64,
    pub value: f64,
}

/// All on-ratio bins merged into one value, likewise all off-ratio bins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombinedCounts {
    pub on: ZoneValue,
    pub off: ZoneValue,
    pub total: u64,
}

fn merge(counts: &NormalizedCounts, role: BinRole) -> ZoneValue {
    let (count, normalizer) = counts
        .bins
        .iter()
        .filter(|b| b.role == role)
        .fold((0u64, 0.0), |(c, w), b| (c + b.count, w + b.normalizer));
    ZoneValue {
        count,
        normalizer,
        value: count as f64 / (counts.total as f64 * normalizer),
    }
}

/// Sums counts and normalizers per role: `sum m / (N * sum w)`.
pub fn combine_off_bins(counts: &NormalizedCounts) -> CombinedCounts {
    CombinedCounts {
        on: merge(counts, BinRole::OnRatio),
        off: merge(counts, BinRole::OffRatio),
        total: counts.total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::null_models::NullModel;
    use approx::assert_abs_diff_eq;

    fn mass(model: NullModel) -> Normalizer {
        Normalizer::ModelMass {
            dist: RatioDistribution::shared(model).unwrap(),
            transform: RatioTransform::StandardR,
            method: MassMethod::Analytic,
        }
    }

    fn single_off(m: u64, n: u64, normalizer: &Normalizer) -> f64 {
        let layout = BinLayout::one_to_one();
        let counts = BinCounts {
            counts: vec![m, 0, 0],
            total: n,
        };
        let w = normalizer.resolve(&layout).unwrap();
        normalize_counts(&counts, &layout, &w).unwrap().bins[0].value
    }

    #[test]
    fn placement() {
        let l = BinLayout::one_to_one();
        let c = count_bins(&[0.45, 0.5, 0.58, 0.9], &l).unwrap();
        assert_eq!(c.counts, vec![0, 2, 1]);
        assert_eq!(c.total, 4);
        assert_eq!(count_bins(&[0.5; 7], &l).unwrap().counts, vec![0, 7, 0]);
        assert_eq!(count_bins(&[4.0 / 9.0], &l).unwrap().counts, vec![0, 1, 0]);
        assert!(count_bins(&[], &l).is_err());
        assert!(count_bins(&[1.5], &l).is_err());
    }

    #[test]
    fn normalization_examples() {
        assert_abs_diff_eq!(
            single_off(10, 100, &Normalizer::BinWidth),
            2.25,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            single_off(10, 100, &mass(NullModel::exponential(1.0).unwrap())),
            2.25,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            single_off(10, 100, &mass(NullModel::uniform(0.0, 1.0).unwrap())),
            1.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn zero_mass_bin_rejected() {
        let layout = BinLayout::one_to_one();
        let w = mass(NullModel::uniform(10.0, 11.0).unwrap())
            .resolve(&layout)
            .unwrap();
        let counts = BinCounts {
            counts: vec![1, 1, 1],
            total: 3,
        };
        assert!(normalize_counts(&counts, &layout, &w).is_err());
    }

    #[test]
    fn combined_off_value() {
        let layout = BinLayout::one_to_one();
        let counts = BinCounts {
            counts: vec![3, 20, 5],
            total: 100,
        };
        let w = Normalizer::BinWidth.resolve(&layout).unwrap();
        let n = normalize_counts(&counts, &layout, &w).unwrap();
        let c = combine_off_bins(&n);
        assert_abs_diff_eq!(c.off.value, 0.9, epsilon = 1e-12);
        assert_eq!(c.off.count, 8);
        assert_abs_diff_eq!(c.on.value, 20.0 / (100.0 / 9.0), epsilon = 1e-12);

        // mass-weighted mean of the separate values equals the merged value
        let off: Vec<_> = n
            .bins
            .iter()
            .filter(|b| b.role == BinRole::OffRatio)
            .collect();
        let weighted = off.iter().map(|b| b.value * b.normalizer).sum::<f64>()
            / off.iter().map(|b| b.normalizer).sum::<f64>();
        assert_abs_diff_eq!(weighted, c.off.value, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_off_bins() {
        let layout = BinLayout::one_to_one();
        let counts = BinCounts {
            counts: vec![4, 9, 4],
            total: 50,
        };
        let w = Normalizer::BinWidth.resolve(&layout).unwrap();
        let n = normalize_counts(&counts, &layout, &w).unwrap();
        assert_abs_diff_eq!(
            combine_off_bins(&n).off.value,
            n.bins[0].value,
            epsilon = 1e-12
        );
    }

    #[test]
    fn monte_carlo_normalizer_tracks_analytic() {
        let layout = BinLayout::one_to_one();
        let dist = RatioDistribution::shared(NullModel::uniform(0.0, 1.0).unwrap()).unwrap();
        let mc = Normalizer::ModelMass {
            dist,
            transform: RatioTransform::StandardR,
            method: MassMethod::MonteCarlo {
                samples: 200_000,
                seed: 4,
            },
        }
        .resolve(&layout)
        .unwrap();
        let exact = mass(NullModel::uniform(0.0, 1.0).unwrap())
            .resolve(&layout)
            .unwrap();
        for (e, x) in mc.monte_carlo.as_ref().unwrap().iter().zip(&exact.values) {
            assert!((e.mass - x).abs() <= 4.0 * e.std_error);
        }
    }
}

//! Simulated on/off comparisons: draw many sequences from a null, compute
//! each sequence's normalized on- and off-ratio values, and test the pairs.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::binning::{
    combine_off_bins, count_bins, normalize_counts, BinLayout, BinNormalizers, BinRole,
    CombinedCounts, NormalizedCounts,
};
use crate::error::{Error, Result, ResultExt};
use crate::null_models::NullModel;
use crate::parallel::map_indexed;
use crate::ratio::{sequence_ratios, IntervalSequence, RatioTransform};
use crate::rng::seeded_rng;
use crate::stats::{wilcoxon_signed_rank, TestReport};

pub const MIN_SEQUENCES: usize = 5;
pub const MIN_SEQUENCE_LEN: usize = 3;

/// How off-ratio bins enter the paired test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OffBins {
    /// All off bins merged into one value per sequence.
    #[default]
    Combined,
    /// One test per off bin, each against the merged on value.
    Separate,
}

/// Normalized values of one sequence under one layout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceValues {
    pub normalized: NormalizedCounts,
    pub combined: CombinedCounts,
}

/// Counts `ratios` in `layout` and normalizes with `normalizers`.
pub fn sequence_values(
    ratios: &[f64],
    layout: &BinLayout,
    normalizers: &BinNormalizers,
) -> Result<SequenceValues> {
    let counts = count_bins(ratios, layout)?;
    let normalized = normalize_counts(&counts, layout, normalizers)?;
    let combined = combine_off_bins(&normalized);
    Ok(SequenceValues {
        normalized,
        combined,
    })
}

/// `(on, off)` pairs for the paired test, one list per test.
pub fn paired_values(
    values: &[SequenceValues],
    off_bins: OffBins,
) -> Vec<(String, Vec<(f64, f64)>)> {
    match off_bins {
        OffBins::Combined => vec![(
            "combined".to_string(),
            values
                .iter()
                .map(|v| (v.combined.on.value, v.combined.off.value))
                .collect(),
        )],
        OffBins::Separate => {
            let Some(first) = values.first() else {
                return Vec::new();
            };
            first
                .normalized
                .bins
                .iter()
                .enumerate()
                .filter(|(_, b)| b.role == BinRole::OffRatio)
                .map(|(k, b)| {
                    let pairs = values
                        .iter()
                        .map(|v| (v.combined.on.value, v.normalized.bins[k].value))
                        .collect();
                    (format!("off[{}, {}]", b.lo, b.hi), pairs)
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: NullModel,
    pub transform: RatioTransform,
    pub layout: BinLayout,
    pub normalizers: BinNormalizers,
    pub n_sequences: usize,
    pub seq_len: usize,
    pub seed: u64,
    pub off_bins: OffBins,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentOutcome {
    /// One report per test; a single one unless off bins are separate.
    pub reports: Vec<TestReport>,
    /// Per-sequence `(on, off)` values of the first test.
    pub pairs: Vec<(f64, f64)>,
}

impl ExperimentOutcome {
    pub fn report(&self) -> &TestReport {
        &self.reports[0]
    }
}

/// Simulates `n_sequences` sequences of `seq_len` intervals and runs the
/// Wilcoxon test on their on/off values. Sequence `j` is drawn from stream
/// `j` of `seed`, so the outcome does not depend on thread count.
pub fn paired_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    if cfg.n_sequences < MIN_SEQUENCES {
        return Err(Error::invalid(format!(
            "need at least {MIN_SEQUENCES} sequences, got {}",
            cfg.n_sequences
        )));
    }
    if cfg.seq_len < MIN_SEQUENCE_LEN {
        return Err(Error::invalid(format!(
            "need at least {MIN_SEQUENCE_LEN} intervals per sequence, got {}",
            cfg.seq_len
        )));
    }
    cfg.model.validate()?;

    let values = map_indexed(cfg.n_sequences, |j| -> Result<SequenceValues> {
        let mut rng = seeded_rng(cfg.seed, j as u64);
        let seq: IntervalSequence =
            cfg.model
                .sample_sequence(cfg.seq_len, &mut rng, j.to_string())?;
        let ratios = sequence_ratios(&seq, &cfg.transform)?;
        sequence_values(&ratios, &cfg.layout, &cfg.normalizers).context(|| format!("sequence {j}"))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut reports = Vec::new();
    let mut first_pairs = None;
    for (label, pairs) in paired_values(&values, cfg.off_bins) {
        let report = wilcoxon_signed_rank(&pairs)
            .context(|| format!("Wilcoxon test ({label})"))?
            .with_seed(cfg.seed)
            .with_meta("off_bins", label)
            .with_meta("null_model", cfg.model.label())
            .with_meta("transform", cfg.transform.label())
            .with_meta("layout", cfg.layout.label())
            .with_meta("normalizer", cfg.normalizers.method.clone())
            .with_meta("n_sequences", json!(cfg.n_sequences))
            .with_meta("seq_len", json!(cfg.seq_len));
        reports.push(report);
        first_pairs.get_or_insert(pairs);
    }
    Ok(ExperimentOutcome {
        reports,
        pairs: first_pairs.unwrap_or_default(),
    })
}

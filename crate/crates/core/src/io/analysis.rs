//! The end-to-end analysis behind `ratiokit analyze` and `ratiokit normalize`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::sequences::{load_sequences, SequenceKind};
use super::spec::{LayoutSpec, NormalizerSpec, NullSpec, TransformSpec};
use crate::binning::{BinLayout, BinNormalizers, BinRole, IntegerRatio, LayoutConvention};
use crate::error::{Error, Result, ResultExt};
use crate::experiment::{paired_values, sequence_values, OffBins, SequenceValues};
use crate::null_models::{DistributionInfo, RatioDistribution};
use crate::ratio::{sequence_ratios, RatioTransform};
use crate::stats::{ks_test, wilcoxon_signed_rank, TestReport};

pub const REPORT_SCHEMA: &str = "ratiokit_report_v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    /// Paired on/off test across sequences, per layout.
    Wilcoxon,
    /// Pooled ratios against the null's distribution in transform space.
    Ks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub input: PathBuf,
    pub kind: SequenceKind,
    pub transform: TransformSpec,
    #[serde(default)]
    pub null: Option<NullSpec>,
    pub layout: LayoutSpec,
    pub normalizer: NormalizerSpec,
    #[serde(default)]
    pub tests: Vec<TestKind>,
    #[serde(default)]
    pub off_bins: OffBins,
    /// Master seed; one is generated and recorded when absent.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl AnalysisConfig {
    pub fn new(input: impl Into<PathBuf>, kind: SequenceKind) -> Self {
        Self {
            input: input.into(),
            kind,
            transform: TransformSpec::R,
            null: None,
            layout: LayoutSpec::OneToOne,
            normalizer: NormalizerSpec::Width,
            tests: vec![TestKind::Wilcoxon],
            off_bins: OffBins::Combined,
            seed: None,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.null.is_none() {
            if self.normalizer.needs_null() {
                return Err(Error::invalid(format!(
                    "normalizer {} needs a null model",
                    self.normalizer
                )));
            }
            if self.transform.needs_null() {
                return Err(Error::invalid(format!(
                    "transform {} needs a null model",
                    self.transform
                )));
            }
            if self.tests.contains(&TestKind::Ks) {
                return Err(Error::invalid("the KS test needs a null model"));
            }
        }
        if self.transform == TransformSpec::Q {
            return Err(Error::invalid("bin layouts live in (0, 1); use a bounded transform (r, rescale-plus, rescale-minus)"));
        }
        Ok(())
    }
}

/// Seed from the clock, used only when the caller supplies none.
pub fn generate_seed() -> u64 {
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_nanos());
    (nanos as u64) ^ ((nanos >> 64) as u64) ^ u64::from(std::process::id()).rotate_left(32)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub input: String,
    pub kind: SequenceKind,
    pub transform: String,
    pub null: Option<DistributionInfo>,
    pub layout: String,
    pub normalizer: NormalizerSpec,
    pub tests: Vec<TestKind>,
    pub off_bins: OffBins,
    pub seed: u64,
    pub seed_generated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayoutReport {
    pub label: String,
    pub convention: LayoutConvention,
    pub anchor: Option<IntegerRatio>,
    pub anchor_r: f64,
    pub edges: Vec<f64>,
    pub roles: Vec<BinRole>,
    pub normalizers: BinNormalizers,
    /// All sequences' ratios counted together.
    pub pooled: SequenceValues,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceReport {
    pub id: String,
    pub n_intervals: usize,
    pub ratios: Vec<f64>,
    /// One entry per layout, in layout order.
    pub layouts: Vec<SequenceValues>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestOutcome {
    pub test: TestKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<TestReport>,
    /// Why the test could not be run, e.g. too few usable pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema: &'static str,
    pub generator: String,
    pub config: ResolvedConfig,
    pub sequences_loaded: usize,
    pub sequences_skipped: usize,
    pub total_ratios: usize,
    pub layouts: Vec<LayoutReport>,
    pub sequences: Vec<SequenceReport>,
    pub tests: Vec<TestOutcome>,
}

impl AnalysisReport {
    /// Outcomes that produced a report.
    pub fn test_reports(&self) -> impl Iterator<Item = &TestReport> {
        self.tests.iter().filter_map(|t| t.report.as_ref())
    }
}

fn outcome(test: TestKind, layout: Option<String>, result: Result<TestReport>) -> TestOutcome {
    match result {
        Ok(report) => TestOutcome {
            test,
            layout,
            report: Some(report),
            error: None,
        },
        Err(e) => TestOutcome {
            test,
            layout,
            report: None,
            error: Some(e.to_string()),
        },
    }
}

pub fn run_analysis(config: &AnalysisConfig) -> Result<AnalysisReport> {
    config.validate()?;
    let seed = config.seed.unwrap_or_else(generate_seed);
    let loaded =
        load_sequences(&config.input, config.kind).context(|| "loading sequences".to_string())?;

    let dist: Option<Arc<RatioDistribution>> = config
        .null
        .as_ref()
        .map(|spec| spec.resolve().and_then(RatioDistribution::shared))
        .transpose()
        .context(|| "resolving the null model".to_string())?;
    let transform: RatioTransform = config.transform.resolve(dist.as_ref())?;
    let layouts: Vec<BinLayout> = config.layout.resolve()?;
    let normalizer = config.normalizer.resolve(dist.as_ref(), &transform, seed)?;
    let normalizers: Vec<BinNormalizers> = layouts
        .iter()
        .map(|l| {
            normalizer
                .resolve(l)
                .context(|| format!("normalizers for layout {}", l.label()))
        })
        .collect::<Result<_>>()?;

    let mut sequences = Vec::with_capacity(loaded.sequences.len());
    for seq in &loaded.sequences {
        let stage = |what: &str| format!("sequence '{}': {what}", seq.source_id());
        let ratios = sequence_ratios(seq, &transform).context(|| stage("ratios"))?;
        let per_layout = layouts
            .iter()
            .zip(&normalizers)
            .map(|(l, w)| {
                sequence_values(&ratios, l, w)
                    .context(|| stage(&format!("binning in {}", l.label())))
            })
            .collect::<Result<_>>()?;
        sequences.push(SequenceReport {
            id: seq.source_id().to_string(),
            n_intervals: seq.len(),
            ratios,
            layouts: per_layout,
        });
    }

    let pooled_ratios: Vec<f64> = sequences
        .iter()
        .flat_map(|s| s.ratios.iter().copied())
        .collect();
    let layout_reports = layouts
        .iter()
        .zip(&normalizers)
        .map(|(l, w)| {
            Ok(LayoutReport {
                label: l.label(),
                convention: l.convention(),
                anchor: l.anchor(),
                anchor_r: l.anchor_r(),
                edges: l.edges().to_vec(),
                roles: l.roles().to_vec(),
                normalizers: w.clone(),
                pooled: sequence_values(&pooled_ratios, l, w)
                    .context(|| format!("pooled counts in {}", l.label()))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut tests = Vec::new();
    for kind in &config.tests {
        match kind {
            TestKind::Wilcoxon => {
                for (k, l) in layouts.iter().enumerate() {
                    let values: Vec<SequenceValues> =
                        sequences.iter().map(|s| s.layouts[k].clone()).collect();
                    for (off_label, pairs) in paired_values(&values, config.off_bins) {
                        let result = wilcoxon_signed_rank(&pairs).map(|r| {
                            r.with_seed(seed)
                                .with_meta("off_bins", off_label)
                                .with_meta("layout", l.label())
                                .with_meta("transform", transform.label())
                                .with_meta("normalizer", normalizers[k].method.clone())
                        });
                        tests.push(outcome(TestKind::Wilcoxon, Some(l.label()), result));
                    }
                }
            }
            TestKind::Ks => {
                let Some(dist) = dist.as_ref() else { continue };
                let result =
                    ks_test(&pooled_ratios, |s| dist.transform_cdf(&transform, s)).map(|r| {
                        r.with_seed(seed)
                            .with_meta("null_model", dist.model().label())
                            .with_meta("transform", transform.label())
                    });
                // a failing CDF evaluation is a numeric problem, not a data one
                let result = match result {
                    Err(e) if matches!(e.root(), Error::NonConvergence { .. }) => {
                        return Err(e.context("KS test"))
                    }
                    other => other,
                };
                tests.push(outcome(TestKind::Ks, None, result));
            }
        }
    }

    Ok(AnalysisReport {
        schema: REPORT_SCHEMA,
        generator: format!("ratiokit {}", env!("CARGO_PKG_VERSION")),
        config: ResolvedConfig {
            input: config.input.display().to_string(),
            kind: config.kind,
            transform: transform.label(),
            null: dist.as_ref().map(|d| d.info()),
            layout: config.layout.to_string(),
            normalizer: config.normalizer,
            tests: config.tests.clone(),
            off_bins: config.off_bins,
            seed,
            seed_generated: config.seed.is_none(),
        },
        sequences_loaded: loaded.sequences.len(),
        sequences_skipped: loaded.skipped,
        total_ratios: pooled_ratios.len(),
        layouts: layout_reports,
        sequences,
        tests,
    })
}

/// Pretty-printed JSON to `path`, or stdout when `path` is `None`.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p)
                .map_err(|e| Error::from(e).context(format!("creating {}", p.display())))?;
            let mut w = BufWriter::new(file);
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            serde_json::to_writer_pretty(&mut w, value)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

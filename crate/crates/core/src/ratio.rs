//! Interval and ratio primitives.
//!
//! Every ratio here is a function of the fraction `q = i2 / i1` of two
//! adjacent intervals, so all of them are unaffected by a common rescaling of
//! the durations. The rhythm ratio is oriented as `r = i1 / (i1 + i2)`, which
//! equals `1 / (1 + q)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered, strictly positive interval durations (seconds) of one sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSequence {
    source_id: String,
    intervals: Vec<f64>,
}

impl IntervalSequence {
    pub fn new(source_id: impl Into<String>, intervals: Vec<f64>) -> Result<Self> {
        if let Some(k) = intervals.iter().position(|&i| !(i > 0.0 && i.is_finite())) {
            return Err(Error::domain(format!(
                "interval {k} is {} (durations must be finite and > 0)",
                intervals[k]
            )));
        }
        Ok(Self {
            source_id: source_id.into(),
            intervals,
        })
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn intervals(&self) -> &[f64] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Strictly increasing event times (seconds).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnsetSequence {
    source_id: String,
    onsets: Vec<f64>,
}

impl OnsetSequence {
    pub fn new(source_id: impl Into<String>, onsets: Vec<f64>) -> Result<Self> {
        if let Some(k) = onsets.iter().position(|t| !t.is_finite()) {
            return Err(Error::domain(format!("onset {k} is not finite")));
        }
        if let Some(k) = onsets.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NonIncreasing { index: k + 1 });
        }
        Ok(Self {
            source_id: source_id.into(),
            onsets,
        })
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn onsets(&self) -> &[f64] {
        &self.onsets
    }
}

/// Successive differences of the onsets. At least three onsets are required
/// so that the result supports one ratio.
pub fn intervals_from_onsets(onsets: &OnsetSequence) -> Result<IntervalSequence> {
    let t = onsets.onsets();
    if t.len() < 3 {
        return Err(Error::invalid(format!(
            "sequence '{}' has {} onsets; at least 3 are needed for one ratio",
            onsets.source_id(),
            t.len()
        )));
    }
    let intervals = t.windows(2).map(|w| w[1] - w[0]).collect();
    IntervalSequence::new(onsets.source_id(), intervals)
}

fn check_pair(i1: f64, i2: f64) -> Result<()> {
    if i1 > 0.0 && i2 > 0.0 && i1.is_finite() && i2.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "intervals must be finite and > 0, got ({i1}, {i2})"
        )))
    }
}

/// Direct fraction `i2 / i1`.
pub fn ratio_q(i1: f64, i2: f64) -> Result<f64> {
    check_pair(i1, i2)?;
    Ok(i2 / i1)
}

/// Rhythm ratio `i1 / (i1 + i2)`, always inside (0, 1).
pub fn ratio_r(i1: f64, i2: f64) -> Result<f64> {
    check_pair(i1, i2)?;
    Ok(i1 / (i1 + i2))
}

/// Cumulative distribution of the interval fraction `q` under some null
/// model. Rescaled ratios are built from it.
pub trait FractionLaw: Send + Sync + fmt::Debug {
    /// `P(Q <= q)` for `q > 0`.
    fn fraction_cdf(&self, q: f64) -> f64;
    /// Density of `q`.
    fn fraction_pdf(&self, q: f64) -> f64;
    /// Stable descriptor of the underlying interval model, e.g. `uniform:0,1`.
    fn model_label(&self) -> String;
}

/// Scale-invariant map from an interval pair to a scalar ratio.
#[derive(Clone, Debug)]
pub enum RatioTransform {
    /// `q = i2 / i1` on (0, inf).
    FractionQ,
    /// `r = i1 / (i1 + i2) = 1 / (1 + q)` on (0, 1).
    StandardR,
    /// `s = P_Q(q)` for the attached law; increasing in `q`.
    RescaledPlus(Arc<dyn FractionLaw>),
    /// `s = 1 - P_Q(q)` for the attached law; decreasing in `q`.
    RescaledMinus(Arc<dyn FractionLaw>),
}

impl RatioTransform {
    /// Applies the transform to an already-computed fraction `q > 0`.
    pub fn apply_q(&self, q: f64) -> f64 {
        match self {
            RatioTransform::FractionQ => q,
            RatioTransform::StandardR => 1.0 / (1.0 + q),
            RatioTransform::RescaledPlus(law) => law.fraction_cdf(q),
            RatioTransform::RescaledMinus(law) => 1.0 - law.fraction_cdf(q),
        }
    }

    pub fn apply(&self, i1: f64, i2: f64) -> Result<f64> {
        check_pair(i1, i2)?;
        Ok(self.apply_unchecked(i1, i2))
    }

    pub(crate) fn apply_unchecked(&self, i1: f64, i2: f64) -> f64 {
        match self {
            RatioTransform::StandardR => i1 / (i1 + i2),
            other => other.apply_q(i2 / i1),
        }
    }

    /// Open interval of valid outputs.
    pub fn codomain(&self) -> (f64, f64) {
        match self {
            RatioTransform::FractionQ => (0.0, f64::INFINITY),
            _ => (0.0, 1.0),
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, RatioTransform::FractionQ)
    }

    /// Short name used in reports and on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            RatioTransform::FractionQ => "q",
            RatioTransform::StandardR => "r",
            RatioTransform::RescaledPlus(_) => "rescale-plus",
            RatioTransform::RescaledMinus(_) => "rescale-minus",
        }
    }

    pub fn label(&self) -> String {
        match self {
            RatioTransform::RescaledPlus(law) | RatioTransform::RescaledMinus(law) => {
                format!("{}[{}]", self.name(), law.model_label())
            }
            _ => self.name().to_string(),
        }
    }
}

impl fmt::Display for RatioTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Applies `transform` to every adjacent pair; the output has one element
/// fewer than the sequence.
pub fn sequence_ratios(seq: &IntervalSequence, transform: &RatioTransform) -> Result<Vec<f64>> {
    if seq.len() < 2 {
        return Err(Error::invalid(format!(
            "sequence '{}' has {} intervals; at least 2 are needed",
            seq.source_id(),
            seq.len()
        )));
    }
    Ok(seq
        .intervals()
        .windows(2)
        .map(|w| transform.apply_unchecked(w[0], w[1]))
        .collect())
}

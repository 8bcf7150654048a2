//! Text specifications used on the command line and in configs, e.g.
//! `uniform:0,1`, `thirds:1:2,1:1,2:1` or `mass-mc:100000`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::binning::{BinLayout, IntegerRatio, MassMethod, Normalizer};
use crate::error::{Error, Result};
use crate::null_models::{NullModel, RatioDistribution, TabulatedDensity};
use crate::ratio::RatioTransform;

fn numbers(spec: &str, body: &str) -> Result<Vec<f64>> {
    body.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("'{spec}': cannot parse '{p}' as a number")))
        })
        .collect()
}

/// Interval null model, e.g. `exponential:1`, `uniform:0,1`, `halfnormal:1`
/// or `table:path/to/density.csv`. Parameters are in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NullSpec {
    Exponential(f64),
    Uniform(f64, f64),
    HalfNormal(f64),
    Table(PathBuf),
}

impl NullSpec {
    pub fn resolve(&self) -> Result<NullModel> {
        match self {
            NullSpec::Exponential(rate) => NullModel::exponential(*rate),
            NullSpec::Uniform(a, b) => NullModel::uniform(*a, *b),
            NullSpec::HalfNormal(scale) => NullModel::half_normal(*scale),
            NullSpec::Table(path) => TabulatedDensity::from_csv(path).map(NullModel::Tabulated),
        }
    }
}

impl FromStr for NullSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s.split_once(':').ok_or_else(|| {
            Error::invalid(format!("null model '{s}' must look like kind:params"))
        })?;
        let arity = |n: usize| -> Result<Vec<f64>> {
            let v = numbers(s, body)?;
            if v.len() != n {
                return Err(Error::invalid(format!("'{s}': expected {n} parameter(s)")));
            }
            Ok(v)
        };
        let spec = match kind {
            "exponential" => NullSpec::Exponential(arity(1)?[0]),
            "uniform" => {
                let v = arity(2)?;
                NullSpec::Uniform(v[0], v[1])
            }
            "halfnormal" => NullSpec::HalfNormal(arity(1)?[0]),
            "table" if !body.is_empty() => return Ok(NullSpec::Table(PathBuf::from(body))),
            _ => {
                return Err(Error::invalid(format!(
                    "unknown null model '{s}' (exponential:rate, uniform:a,b, halfnormal:scale, table:path)"
                )))
            }
        };
        // parameter checks happen here so bad specs fail before any work
        spec.resolve()?;
        Ok(spec)
    }
}

impl fmt::Display for NullSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NullSpec::Exponential(rate) => write!(f, "exponential:{rate}"),
            NullSpec::Uniform(a, b) => write!(f, "uniform:{a},{b}"),
            NullSpec::HalfNormal(scale) => write!(f, "halfnormal:{scale}"),
            NullSpec::Table(path) => write!(f, "table:{}", path.display()),
        }
    }
}

impl TryFrom<String> for NullSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<NullSpec> for String {
    fn from(spec: NullSpec) -> Self {
        spec.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformSpec {
    Q,
    R,
    RescalePlus,
    RescaleMinus,
}

impl TransformSpec {
    pub fn needs_null(&self) -> bool {
        matches!(
            self,
            TransformSpec::RescalePlus | TransformSpec::RescaleMinus
        )
    }

    pub fn resolve(&self, null: Option<&Arc<RatioDistribution>>) -> Result<RatioTransform> {
        let need = || {
            null.ok_or_else(|| {
                Error::invalid(format!("transform {self} needs a null model (--null)"))
            })
        };
        Ok(match self {
            TransformSpec::Q => RatioTransform::FractionQ,
            TransformSpec::R => RatioTransform::StandardR,
            TransformSpec::RescalePlus => need()?.plus_transform(),
            TransformSpec::RescaleMinus => need()?.minus_transform(),
        })
    }
}

impl FromStr for TransformSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" => Ok(TransformSpec::Q),
            "r" => Ok(TransformSpec::R),
            "rescale-plus" => Ok(TransformSpec::RescalePlus),
            "rescale-minus" => Ok(TransformSpec::RescaleMinus),
            _ => Err(Error::invalid(format!(
                "unknown transform '{s}' (q, r, rescale-plus, rescale-minus)"
            ))),
        }
    }
}

impl fmt::Display for TransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformSpec::Q => "q",
            TransformSpec::R => "r",
            TransformSpec::RescalePlus => "rescale-plus",
            TransformSpec::RescaleMinus => "rescale-minus",
        })
    }
}

/// `one-to-one`, `thirds:m:n,m:n,...` or `edges:e1,e2,...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LayoutSpec {
    OneToOne,
    Thirds(Vec<IntegerRatio>),
    Edges(Vec<f64>),
}

impl LayoutSpec {
    pub fn resolve(&self) -> Result<Vec<BinLayout>> {
        match self {
            LayoutSpec::OneToOne => Ok(vec![BinLayout::one_to_one()]),
            LayoutSpec::Thirds(anchors) => BinLayout::thirds(anchors),
            LayoutSpec::Edges(edges) => Ok(vec![BinLayout::from_edges(edges.clone())?]),
        }
    }
}

impl FromStr for LayoutSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "one-to-one" {
            return Ok(LayoutSpec::OneToOne);
        }
        let spec = if let Some(body) = s.strip_prefix("thirds:") {
            LayoutSpec::Thirds(body.split(',').map(str::parse).collect::<Result<_>>()?)
        } else if let Some(body) = s.strip_prefix("edges:") {
            LayoutSpec::Edges(numbers(s, body)?)
        } else {
            return Err(Error::invalid(format!(
                "unknown layout '{s}' (one-to-one, thirds:m:n,..., edges:e1,e2,...)"
            )));
        };
        spec.resolve()?;
        Ok(spec)
    }
}

impl fmt::Display for LayoutSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayoutSpec::OneToOne => f.write_str("one-to-one"),
            LayoutSpec::Thirds(a) => {
                write!(
                    f,
                    "thirds:{}",
                    a.iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(",")
                )
            }
            LayoutSpec::Edges(e) => {
                write!(
                    f,
                    "edges:{}",
                    e.iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(",")
                )
            }
        }
    }
}

impl TryFrom<String> for LayoutSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LayoutSpec> for String {
    fn from(spec: LayoutSpec) -> Self {
        spec.to_string()
    }
}

/// `width`, `mass` (analytic null mass) or `mass-mc:n` (Monte Carlo with `n` draws).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum NormalizerSpec {
    Width,
    Mass,
    MassMc(u64),
}

impl NormalizerSpec {
    pub fn needs_null(&self) -> bool {
        !matches!(self, NormalizerSpec::Width)
    }

    /// Monte Carlo draws use stream 0 of `seed`.
    pub fn resolve(
        &self,
        null: Option<&Arc<RatioDistribution>>,
        transform: &RatioTransform,
        seed: u64,
    ) -> Result<Normalizer> {
        let method = match self {
            NormalizerSpec::Width => return Ok(Normalizer::BinWidth),
            NormalizerSpec::Mass => MassMethod::Analytic,
            NormalizerSpec::MassMc(samples) => MassMethod::MonteCarlo {
                samples: *samples,
                seed,
            },
        };
        let dist = null.ok_or_else(|| {
            Error::invalid(format!("normalizer {self} needs a null model (--null)"))
        })?;
        Ok(Normalizer::ModelMass {
            dist: dist.clone(),
            transform: transform.clone(),
            method,
        })
    }
}

impl FromStr for NormalizerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "width" => Ok(NormalizerSpec::Width),
            "mass" => Ok(NormalizerSpec::Mass),
            _ => match s.strip_prefix("mass-mc:").map(str::parse::<u64>) {
                Some(Ok(n)) if n > 0 => Ok(NormalizerSpec::MassMc(n)),
                _ => Err(Error::invalid(format!(
                    "unknown normalizer '{s}' (width, mass, mass-mc:n with n >= 1)"
                ))),
            },
        }
    }
}

impl fmt::Display for NormalizerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalizerSpec::Width => f.write_str("width"),
            NormalizerSpec::Mass => f.write_str("mass"),
            NormalizerSpec::MassMc(n) => write!(f, "mass-mc:{n}"),
        }
    }
}

impl TryFrom<String> for NormalizerSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<NormalizerSpec> for String {
    fn from(spec: NormalizerSpec) -> Self {
        spec.to_string()
    }
}

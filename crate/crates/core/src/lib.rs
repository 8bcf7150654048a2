//! Integer-ratio rhythm analysis.
//!
//! Adjacent inter-onset intervals are mapped to scale-invariant ratios,
//! counted in bins around small-integer anchors such as 1:1, and compared
//! against what an i.i.d. interval null predicts for those bins. The null
//! can be the Poisson (exponential) default, uniform or half-normal
//! intervals, or a tabulated density.
//!
//! ```
//! use ratiokit::null_models::{NullModel, RatioDistribution};
//! use ratiokit::ratio::RatioTransform;
//!
//! let dist = RatioDistribution::new(NullModel::uniform(0.0, 1.0)?)?;
//! let w = dist.bin_mass_analytic(&RatioTransform::StandardR, 4.0 / 9.0, 0.5)?;
//! assert!((w - 0.1).abs() < 1e-12);
//! # Ok::<(), ratiokit::Error>(())
//! ```

// `!(x > 0.0)` is how NaN gets rejected along with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binning;
pub mod error;
pub mod experiment;
pub mod io;
pub mod null_models;
pub mod numerics;
mod parallel;
pub mod ratio;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};

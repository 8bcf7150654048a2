//! Interval null models and the ratio distributions they induce.

mod interval;
mod ratio_dist;

pub use interval::{NullModel, TabulatedDensity, MIN_TABLE_ROWS};
pub use ratio_dist::{
    uniform, DistributionInfo, EvalMode, RatioDistribution, CDF_TABLE_CELLS, QUADRATURE_TOL,
};

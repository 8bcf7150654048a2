//! Bin layouts around integer-ratio anchors and normalized bin counts.

mod counts;
mod layout;

pub use counts::{
    combine_off_bins, count_bins, normalize_counts, BinCounts, BinNormalizers, CombinedCounts,
    MassMethod, NormalizedBin, NormalizedCounts, Normalizer, ZoneValue,
};
pub use layout::{
    one_to_one_layout, thirds_layout, Bin, BinLayout, BinRole, IntegerRatio, LayoutConvention,
};

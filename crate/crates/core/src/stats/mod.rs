//! Wilcoxon signed-rank and one-sample Kolmogorov-Smirnov tests, with
//! p-values carried in log space so extreme significance never underflows.

mod ks;
mod report;
mod tails;
mod wilcoxon;

pub use ks::{kolmogorov_sf, ks_statistic, ks_test};
pub use report::{TestMethod, TestReport};
pub use tails::{ln_normal_cdf, log10_two_sided_normal};
pub use wilcoxon::{
    signed_ranks, wilcoxon_exact_p, wilcoxon_normal_p, wilcoxon_signed_rank, SignedRanks,
    EXACT_MAX_N, MIN_USABLE_PAIRS,
};

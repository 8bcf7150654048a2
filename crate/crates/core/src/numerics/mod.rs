//! Quadrature, monotone inversion and the Monte Carlo bin-mass estimator.

mod montecarlo;
mod quadrature;
mod roots;

pub use montecarlo::{
    mc_bin_mass, mc_bin_mass_chunked, mc_bin_masses, McEstimate, DEFAULT_MC_SAMPLES,
};
pub use quadrature::{
    integrate_adaptive, integrate_with_breaks, integrate_with_budget, QuadratureResult, MAX_PANELS,
};
pub use roots::invert_monotone;

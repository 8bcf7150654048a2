use statrs::function::erf::erfc;

const LN_10: f64 = std::f64::consts::LN_10;

/// `ln Phi(z)` for the standard normal CDF, accurate far into the lower tail
/// where `Phi(z)` itself underflows.
pub fn ln_normal_cdf(z: f64) -> f64 {
    if z > -30.0 {
        return (0.5 * erfc(-z / std::f64::consts::SQRT_2)).ln();
    }
    // Phi(z) = phi(z) / |z| * (1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8 - ...)
    let x = -z;
    let inv2 = 1.0 / (x * x);
    let series = 1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2 * (1.0 - 7.0 * inv2)));
    -0.5 * x * x - 0.5 * (2.0 * std::f64::consts::PI).ln() - x.ln() + series.ln()
}

/// `log10` of the two-sided p-value `2 Phi(-|z|)`, capped at 0.
pub fn log10_two_sided_normal(z: f64) -> f64 {
    ((std::f64::consts::LN_2 + ln_normal_cdf(-z.abs())) / LN_10).min(0.0)
}

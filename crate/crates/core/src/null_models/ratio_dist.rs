//! Distributions of interval ratios implied by an i.i.d. interval null.
//!
//! For independent intervals with density `p`, the fraction `q = i2 / i1`
//! has density `p_Q(q) = int_0^inf t p(t) p(q t) dt`. The rhythm ratio
//! `r = 1 / (1 + q)` then has `p_R(r) = p_Q((1 - r) / r) / r^2`, evaluated
//! here in the equivalent form `int_0^inf s p(r s) p((1 - r) s) ds`, which
//! avoids the `1 / r^2` amplification near the ends of (0, 1).
//!
//! Exponential and uniform intervals have exact formulas; the remaining
//! models are integrated numerically.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::null_models::NullModel;
use crate::numerics::{integrate_with_breaks, invert_monotone};
use crate::parallel::map_indexed;
use crate::ratio::{FractionLaw, RatioTransform};

/// Absolute tolerance of every internal quadrature.
pub const QUADRATURE_TOL: f64 = 1e-11;

/// Number of cells in the cached `P_Q` table used for rescaling in
/// quadrature mode. The table is indexed by `u = q / (1 + q)`.
pub const CDF_TABLE_CELLS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    ClosedForm,
    Quadrature,
}

#[derive(Debug)]
pub struct RatioDistribution {
    model: NullModel,
    mode: EvalMode,
    cdf_table: OnceLock<Vec<f64>>,
}

/// Short description for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionInfo {
    pub model: String,
    pub mode: EvalMode,
    /// Upper integration limit on durations when `mode` is quadrature.
    pub truncation_s: Option<f64>,
    /// `c = b / a` for a uniform null, the only thing its ratio law depends
    /// on. Infinite when `a = 0`, so omitted then.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape_ratio: Option<f64>,
}

impl RatioDistribution {
    /// Uses closed forms where they exist.
    pub fn new(model: NullModel) -> Result<Self> {
        let mode = if model.has_closed_form() {
            EvalMode::ClosedForm
        } else {
            EvalMode::Quadrature
        };
        Self::with_mode(model, mode)
    }

    pub fn with_mode(model: NullModel, mode: EvalMode) -> Result<Self> {
        model.validate()?;
        if mode == EvalMode::ClosedForm && !model.has_closed_form() {
            return Err(Error::invalid(format!(
                "no closed form available for {model}"
            )));
        }
        Ok(Self {
            model,
            mode,
            cdf_table: OnceLock::new(),
        })
    }

    /// Shared handle, as needed by the rescaled transforms.
    pub fn shared(model: NullModel) -> Result<Arc<Self>> {
        Self::new(model).map(Arc::new)
    }

    pub fn model(&self) -> &NullModel {
        &self.model
    }

    pub fn mode(&self) -> EvalMode {
        self.mode
    }

    pub fn info(&self) -> DistributionInfo {
        DistributionInfo {
            model: self.model.label(),
            mode: self.mode,
            truncation_s: (self.mode == EvalMode::Quadrature).then(|| self.model.truncation()),
            shape_ratio: match self.model {
                NullModel::Uniform { a, b } if a > 0.0 => Some(b / a),
                _ => None,
            },
        }
    }

    /// Transform `s = P_Q(q)` under this distribution.
    pub fn plus_transform(self: &Arc<Self>) -> RatioTransform {
        RatioTransform::RescaledPlus(self.clone())
    }

    /// Transform `s = 1 - P_Q(q)` under this distribution.
    pub fn minus_transform(self: &Arc<Self>) -> RatioTransform {
        RatioTransform::RescaledMinus(self.clone())
    }

    pub fn ratio_q_pdf(&self, q: f64) -> Result<f64> {
        check_q(q)?;
        Ok(match (self.mode, &self.model) {
            (EvalMode::ClosedForm, NullModel::Exponential { .. }) => 1.0 / ((1.0 + q) * (1.0 + q)),
            (EvalMode::ClosedForm, NullModel::Uniform { a, b }) => uniform::q_pdf(*a, *b, q),
            _ => self.quad_q_pdf(q)?,
        })
    }

    pub fn ratio_q_cdf(&self, q: f64) -> Result<f64> {
        check_q(q)?;
        self.q_cdf_unchecked(q)
    }

    pub fn ratio_r_pdf(&self, r: f64) -> Result<f64> {
        check_r(r)?;
        Ok(match (self.mode, &self.model) {
            (EvalMode::ClosedForm, NullModel::Exponential { .. }) => 1.0,
            (EvalMode::ClosedForm, NullModel::Uniform { a, b }) => uniform::r_pdf(*a, *b, r),
            _ => self.quad_r_pdf(r)?,
        })
    }

    pub fn ratio_r_cdf(&self, r: f64) -> Result<f64> {
        check_r(r)?;
        self.r_cdf_unchecked(r)
    }

    /// `f+(q) = P_Q(q)`: uniform on (0, 1) when `q` follows this null.
    pub fn rescale_plus(&self, q: f64) -> Result<f64> {
        check_q(q)?;
        Ok(self.fast_q_cdf(q))
    }

    /// `f-(q) = 1 - P_Q(q)`. For exponential intervals this is the rhythm ratio.
    pub fn rescale_minus(&self, q: f64) -> Result<f64> {
        check_q(q)?;
        Ok(match (self.mode, &self.model) {
            (EvalMode::ClosedForm, NullModel::Exponential { .. }) => 1.0 / (1.0 + q),
            _ => 1.0 - self.fast_q_cdf(q),
        })
    }

    /// Density `p_S(s)` of the transformed ratio `s` under this null.
    pub fn transform_pdf(&self, transform: &RatioTransform, s: f64) -> Result<f64> {
        match transform {
            RatioTransform::FractionQ => self.ratio_q_pdf(s),
            RatioTransform::StandardR => self.ratio_r_pdf(s),
            RatioTransform::RescaledPlus(law) | RatioTransform::RescaledMinus(law) => {
                check_r(s)?;
                if law.model_label() == self.model.label() {
                    return Ok(1.0);
                }
                let level = match transform {
                    RatioTransform::RescaledPlus(_) => s,
                    _ => 1.0 - s,
                };
                let q = invert_law(law.as_ref(), level)?;
                let own = self.ratio_q_pdf(q)?;
                let theirs = law.fraction_pdf(q);
                if theirs > 0.0 {
                    Ok(own / theirs)
                } else if own == 0.0 {
                    Ok(0.0)
                } else {
                    Err(Error::domain(format!(
                        "{} has no density at q={q}, where {} does",
                        law.model_label(),
                        self.model.label()
                    )))
                }
            }
        }
    }

    /// `P_S(s)`. Accepts the closed codomain, so bin edges may sit at its ends.
    pub fn transform_cdf(&self, transform: &RatioTransform, s: f64) -> Result<f64> {
        let (lo, hi) = transform.codomain();
        if !(s >= lo && s <= hi) {
            return Err(Error::domain(format!(
                "{s} outside the codomain [{lo}, {hi}] of transform {transform}"
            )));
        }
        if s == lo {
            return Ok(0.0);
        }
        if s == hi {
            return Ok(1.0);
        }
        match transform {
            RatioTransform::FractionQ => self.q_cdf_unchecked(s),
            RatioTransform::StandardR => self.r_cdf_unchecked(s),
            RatioTransform::RescaledPlus(law) => {
                if law.model_label() == self.model.label() {
                    return Ok(s);
                }
                let q = invert_law(law.as_ref(), s)?;
                self.q_cdf_unchecked(q)
            }
            RatioTransform::RescaledMinus(law) => {
                if law.model_label() == self.model.label() {
                    return Ok(s);
                }
                let q = invert_law(law.as_ref(), 1.0 - s)?;
                Ok(1.0 - self.q_cdf_unchecked(q)?)
            }
        }
    }

    /// Null probability mass `w = P_S(v) - P_S(u)` of the bin `[u, v]` in
    /// the space of `transform`. Equals `v - u` whenever `p_S` is flat.
    pub fn bin_mass_analytic(&self, transform: &RatioTransform, u: f64, v: f64) -> Result<f64> {
        if !(u < v) {
            return Err(Error::domain(format!(
                "bin edges must satisfy u < v, got [{u}, {v}]"
            )));
        }
        let upper = self.transform_cdf(transform, v)?;
        let lower = self.transform_cdf(transform, u)?;
        Ok((upper - lower).max(0.0))
    }

    fn q_cdf_unchecked(&self, q: f64) -> Result<f64> {
        if q <= 0.0 {
            return Ok(0.0);
        }
        Ok(match (self.mode, &self.model) {
            (EvalMode::ClosedForm, NullModel::Exponential { .. }) => q / (1.0 + q),
            (EvalMode::ClosedForm, NullModel::Uniform { a, b }) => uniform::q_cdf(*a, *b, q),
            _ => self.quad_q_cdf(q)?,
        })
    }

    fn r_cdf_unchecked(&self, r: f64) -> Result<f64> {
        Ok(match (self.mode, &self.model) {
            (EvalMode::ClosedForm, NullModel::Exponential { .. }) => r,
            (EvalMode::ClosedForm, NullModel::Uniform { a, b }) => uniform::r_cdf(*a, *b, r),
            // P(i1 / (i1 + i2) <= r) = P(i1 <= i2 r / (1 - r)) = P_Q(r / (1 - r))
            _ => self.quad_q_cdf(r / (1.0 - r))?,
        })
    }

    // Closed form where available, otherwise the cached table.
    fn fast_q_cdf(&self, q: f64) -> f64 {
        match (self.mode, &self.model) {
            (EvalMode::ClosedForm, NullModel::Exponential { .. }) => q / (1.0 + q),
            (EvalMode::ClosedForm, NullModel::Uniform { a, b }) => uniform::q_cdf(*a, *b, q),
            _ => self.table_q_cdf(q),
        }
    }

    fn table_q_cdf(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        if q == f64::INFINITY {
            return 1.0;
        }
        let table = self.cdf_table.get_or_init(|| self.build_cdf_table());
        let u = q / (1.0 + q);
        let pos = u * CDF_TABLE_CELLS as f64;
        let k = (pos.floor() as usize).min(CDF_TABLE_CELLS - 1);
        let frac = pos - k as f64;
        table[k] + (table[k + 1] - table[k]) * frac
    }

    fn build_cdf_table(&self) -> Vec<f64> {
        let n = CDF_TABLE_CELLS;
        let mut table = map_indexed(n + 1, |k| {
            if k == 0 {
                0.0
            } else if k == n {
                1.0
            } else {
                let u = k as f64 / n as f64;
                // a failed panel only loses accuracy in one table cell
                self.quad_q_cdf(u / (1.0 - u)).unwrap_or_else(|e| match e {
                    Error::NonConvergence { estimate, .. } => estimate,
                    _ => f64::NAN,
                })
            }
        });
        let mut running = 0.0f64;
        for v in table.iter_mut() {
            let clean = if v.is_finite() {
                v.clamp(0.0, 1.0)
            } else {
                running
            };
            running = running.max(clean);
            *v = running;
        }
        table
    }

    fn duration_breaks(&self, scales: &[f64], upper: f64) -> Vec<f64> {
        let mut pts = vec![0.0, upper];
        for b in self.model.breakpoints() {
            for &c in scales {
                let p = b / c;
                if p > 0.0 && p < upper {
                    pts.push(p);
                }
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn quad_q_pdf(&self, q: f64) -> Result<f64> {
        let m = &self.model;
        let upper = m.truncation() / q.max(1.0);
        let pts = self.duration_breaks(&[1.0, q], upper);
        Ok(integrate_with_breaks(|t| t * m.pdf(t) * m.pdf(q * t), &pts, QUADRATURE_TOL)?.value)
    }

    fn quad_q_cdf(&self, q: f64) -> Result<f64> {
        let m = &self.model;
        let upper = m.truncation();
        let pts = self.duration_breaks(&[1.0, q], upper);
        // P(i2 <= q i1) = int p(t) F(q t) dt
        let v = integrate_with_breaks(|t| m.pdf(t) * m.interval_cdf(q * t), &pts, QUADRATURE_TOL)?
            .value;
        Ok(v.clamp(0.0, 1.0))
    }

    fn quad_r_pdf(&self, r: f64) -> Result<f64> {
        let m = &self.model;
        let (x, y) = (r, 1.0 - r);
        let upper = m.truncation() / x.max(y);
        let pts = self.duration_breaks(&[x, y], upper);
        Ok(integrate_with_breaks(|s| s * m.pdf(x * s) * m.pdf(y * s), &pts, QUADRATURE_TOL)?.value)
    }
}

impl FractionLaw for RatioDistribution {
    fn fraction_cdf(&self, q: f64) -> f64 {
        if q <= 0.0 {
            0.0
        } else {
            self.fast_q_cdf(q)
        }
    }

    fn fraction_pdf(&self, q: f64) -> f64 {
        self.ratio_q_pdf(q).unwrap_or(0.0)
    }

    fn model_label(&self) -> String {
        self.model.label()
    }
}

// q with law(q) = level, searched over u = q / (1 + q) in [0, 1]
fn invert_law(law: &dyn FractionLaw, level: f64) -> Result<f64> {
    let g = |u: f64| {
        if u >= 1.0 {
            1.0
        } else {
            law.fraction_cdf(u / (1.0 - u))
        }
    };
    let u = invert_monotone(g, level.clamp(0.0, 1.0), 0.0, 1.0, 1e-13)?;
    Ok(if u >= 1.0 {
        f64::INFINITY
    } else {
        u / (1.0 - u)
    })
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("q must be finite and > 0, got {q}")))
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("ratio must lie in (0, 1), got {r}")))
    }
}

/// Exact ratio laws for intervals uniform on `[a, b]`.
pub mod uniform {
    fn scale(a: f64, b: f64) -> f64 {
        1.0 / (2.0 * (b - a) * (b - a))
    }

    pub fn q_pdf(a: f64, b: f64, q: f64) -> f64 {
        if q < a / b || q > b / a {
            0.0
        } else if q <= 1.0 {
            scale(a, b) * (b * b - (a / q) * (a / q))
        } else {
            scale(a, b) * ((b / q) * (b / q) - a * a)
        }
    }

    pub fn q_cdf(a: f64, b: f64, q: f64) -> f64 {
        let v = if q <= a / b {
            0.0
        } else if q <= 1.0 {
            scale(a, b) * (q * b * b + a * a / q - 2.0 * a * b)
        } else if q < b / a {
            1.0 - scale(a, b) * (b * b / q + q * a * a - 2.0 * a * b)
        } else {
            1.0
        };
        v.clamp(0.0, 1.0)
    }

    pub fn r_pdf(a: f64, b: f64, r: f64) -> f64 {
        let (lo, hi) = r_support(a, b);
        if r < lo || r > hi {
            0.0
        } else if r <= 0.5 {
            scale(a, b) * ((b / (1.0 - r)).powi(2) - (a / r).powi(2))
        } else {
            scale(a, b) * ((b / r).powi(2) - (a / (1.0 - r)).powi(2))
        }
    }

    pub fn r_cdf(a: f64, b: f64, r: f64) -> f64 {
        let (lo, hi) = r_support(a, b);
        let s = a + b;
        let v = if r <= lo {
            0.0
        } else if r <= 0.5 {
            scale(a, b) * (b * b / (1.0 - r) + a * a / r - s * s)
        } else if r < hi {
            1.0 - scale(a, b) * (b * b / r + a * a / (1.0 - r) - s * s)
        } else {
            1.0
        };
        v.clamp(0.0, 1.0)
    }

    /// `[a / (a + b), b / (a + b)]`.
    pub fn r_support(a: f64, b: f64) -> (f64, f64) {
        (a / (a + b), b / (a + b))
    }

    /// Null mass of each on-ratio bin `[4/9, 1/2]`, `[1/2, 5/9]` around 1:1.
    pub fn one_to_one_on_mass(a: f64, b: f64) -> f64 {
        0.5 - (4.0 * b - 5.0 * a).powi(2) / (40.0 * (b - a).powi(2))
    }

    /// Null mass of each off-ratio bin `[2/5, 4/9]`, `[5/9, 3/5]` around 1:1.
    pub fn one_to_one_off_mass(a: f64, b: f64) -> f64 {
        (4.0 * b - 5.0 * a).powi(2) / (40.0 * (b - a).powi(2))
            - (2.0 * b - 3.0 * a).powi(2) / (12.0 * (b - a).powi(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_with_breaks;
    use approx::assert_abs_diff_eq;

    fn exp1() -> RatioDistribution {
        RatioDistribution::new(NullModel::exponential(1.0).unwrap()).unwrap()
    }

    fn unif(a: f64, b: f64) -> RatioDistribution {
        RatioDistribution::new(NullModel::uniform(a, b).unwrap()).unwrap()
    }

    #[test]
    fn info_reports_uniform_shape_ratio() {
        assert_eq!(unif(3.0, 15.0).info().shape_ratio, Some(5.0));
        assert_eq!(unif(0.0, 1.0).info().shape_ratio, None);
        assert_eq!(exp1().info().shape_ratio, None);
    }

    #[test]
    fn exponential_fraction() {
        for rate in [0.1, 1.0, 10.0] {
            let d = RatioDistribution::new(NullModel::exponential(rate).unwrap()).unwrap();
            assert_abs_diff_eq!(d.ratio_q_pdf(1e-12).unwrap(), 1.0, epsilon = 1e-11);
            assert_eq!(d.ratio_q_pdf(1.0).unwrap(), 0.25);
            assert_eq!(d.ratio_q_cdf(1.0).unwrap(), 0.5);
        }
        assert!(exp1().ratio_q_pdf(0.0).is_err());
        assert!(exp1().ratio_q_cdf(-1.0).is_err());
    }

    #[test]
    fn uniform_fraction() {
        // (1/2)(b^2 - a^2)/(b - a)^2 at a=1, b=2
        assert_abs_diff_eq!(
            unif(1.0, 2.0).ratio_q_pdf(1.0).unwrap(),
            1.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            unif(1.0, 2.0).ratio_q_cdf(1.0).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert_eq!(unif(1.0, 3.0).ratio_q_cdf(1.0 / 3.0).unwrap(), 0.0);
        assert_eq!(unif(1.0, 3.0).ratio_q_cdf(0.2).unwrap(), 0.0);
        assert_eq!(unif(1.0, 3.0).ratio_q_pdf(3.5).unwrap(), 0.0);
    }

    #[test]
    fn rhythm_ratio_examples() {
        assert_eq!(exp1().ratio_r_pdf(0.37).unwrap(), 1.0);
        assert_abs_diff_eq!(
            unif(0.0, 1.0).ratio_r_pdf(0.5).unwrap(),
            2.0,
            epsilon = 1e-15
        );
        assert_eq!(unif(1.0, 2.0).ratio_r_pdf(0.2).unwrap(), 0.0);
        assert_eq!(exp1().ratio_r_cdf(0.25).unwrap(), 0.25);
        assert_abs_diff_eq!(
            unif(0.0, 1.0).ratio_r_cdf(4.0 / 9.0).unwrap(),
            0.4,
            epsilon = 1e-15
        );
        assert!(exp1().ratio_r_pdf(1.0).is_err());
        assert!(exp1().ratio_r_cdf(0.0).is_err());
        for d in [exp1(), unif(1.0, 5.0)] {
            assert_abs_diff_eq!(d.ratio_r_cdf(1.0 - 1e-12).unwrap(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn rescaling_examples() {
        let e = exp1();
        assert_eq!(e.rescale_plus(1.0).unwrap(), 0.5);
        assert_eq!(e.rescale_plus(3.0).unwrap(), 0.75);
        assert_eq!(e.rescale_minus(1.0).unwrap(), 0.5);
        let u = unif(0.0, 1.0);
        assert_abs_diff_eq!(u.rescale_plus(1.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(u.rescale_minus(1e300).unwrap(), 0.0, epsilon = 1e-12);
        for q in [0.01, 0.3, 1.0, 2.5, 40.0] {
            for d in [&e, &u] {
                let sum = d.rescale_plus(q).unwrap() + d.rescale_minus(q).unwrap();
                assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-15);
            }
            assert_eq!(e.rescale_minus(q).unwrap(), 1.0 / (1.0 + q));
        }
    }

    #[test]
    fn bin_mass_examples() {
        let r = RatioTransform::StandardR;
        assert_abs_diff_eq!(
            exp1().bin_mass_analytic(&r, 0.4, 4.0 / 9.0).unwrap(),
            2.0 / 45.0,
            epsilon = 1e-15
        );
        let u = unif(0.0, 1.0);
        assert_abs_diff_eq!(
            u.bin_mass_analytic(&r, 4.0 / 9.0, 0.5).unwrap(),
            0.1,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            u.bin_mass_analytic(&r, 0.4, 4.0 / 9.0).unwrap(),
            1.0 / 15.0,
            epsilon = 1e-15
        );
        assert!(u.bin_mass_analytic(&r, 0.5, 0.4).is_err());
        assert!(u.bin_mass_analytic(&r, 0.5, 1.2).is_err());
        assert_abs_diff_eq!(
            u.bin_mass_analytic(&r, 0.0, 1.0).unwrap(),
            1.0,
            epsilon = 0.0
        );
    }

    #[test]
    fn one_to_one_masses_match_cdf_difference() {
        for (a, b) in [(0.0, 1.0), (1.0, 2.0), (1.0, 5.0), (0.3, 0.31)] {
            let d = unif(a, b);
            let r = RatioTransform::StandardR;
            let on_left = d.bin_mass_analytic(&r, 4.0 / 9.0, 0.5).unwrap();
            let on_right = d.bin_mass_analytic(&r, 0.5, 5.0 / 9.0).unwrap();
            let off_left = d.bin_mass_analytic(&r, 0.4, 4.0 / 9.0).unwrap();
            let off_right = d.bin_mass_analytic(&r, 5.0 / 9.0, 0.6).unwrap();
            // only when the bins lie inside the support
            if uniform::r_support(a, b).0 <= 0.4 {
                assert_abs_diff_eq!(on_left, uniform::one_to_one_on_mass(a, b), epsilon = 1e-12);
                assert_abs_diff_eq!(
                    off_left,
                    uniform::one_to_one_off_mass(a, b),
                    epsilon = 1e-12
                );
            }
            assert_abs_diff_eq!(on_left, on_right, epsilon = 1e-12);
            assert_abs_diff_eq!(off_left, off_right, epsilon = 1e-12);
        }
    }

    #[test]
    fn half_normal_matches_cauchy_like_closed_form() {
        // |N| / |N| has density 2 / (pi (1 + q^2)); r-density 2 / (pi (r^2 + (1 - r)^2))
        let d = RatioDistribution::new(NullModel::half_normal(1.3).unwrap()).unwrap();
        assert_eq!(d.mode(), EvalMode::Quadrature);
        for &q in &[0.05, 0.5, 1.0, 3.0, 30.0] {
            let exact = 2.0 / (std::f64::consts::PI * (1.0 + q * q));
            assert_abs_diff_eq!(d.ratio_q_pdf(q).unwrap(), exact, epsilon = 1e-9);
            let exact_cdf = 2.0 / std::f64::consts::PI * q.atan();
            assert_abs_diff_eq!(d.ratio_q_cdf(q).unwrap(), exact_cdf, epsilon = 1e-9);
        }
        for &r in &[0.01, 0.3, 0.5, 0.77, 0.999] {
            let exact = 2.0 / (std::f64::consts::PI * (r * r + (1.0 - r) * (1.0 - r)));
            assert_abs_diff_eq!(d.ratio_r_pdf(r).unwrap(), exact, epsilon = 1e-9);
        }
    }

    #[test]
    fn quadrature_mode_agrees_with_closed_forms() {
        for model in [
            NullModel::exponential(2.0).unwrap(),
            NullModel::uniform(1.0, 2.0).unwrap(),
        ] {
            let exact = RatioDistribution::new(model.clone()).unwrap();
            let quad = RatioDistribution::with_mode(model, EvalMode::Quadrature).unwrap();
            for k in 1..200 {
                let r = k as f64 / 200.0;
                let q = r / (1.0 - r) * 3.0;
                assert_abs_diff_eq!(
                    exact.ratio_r_pdf(r).unwrap(),
                    quad.ratio_r_pdf(r).unwrap(),
                    epsilon = 1e-8
                );
                assert_abs_diff_eq!(
                    exact.ratio_r_cdf(r).unwrap(),
                    quad.ratio_r_cdf(r).unwrap(),
                    epsilon = 1e-8
                );
                assert_abs_diff_eq!(
                    exact.ratio_q_pdf(q).unwrap(),
                    quad.ratio_q_pdf(q).unwrap(),
                    epsilon = 1e-8
                );
                assert_abs_diff_eq!(
                    exact.ratio_q_cdf(q).unwrap(),
                    quad.ratio_q_cdf(q).unwrap(),
                    epsilon = 1e-8
                );
                assert_abs_diff_eq!(
                    exact.rescale_plus(q).unwrap(),
                    quad.rescale_plus(q).unwrap(),
                    epsilon = 1e-6
                );
            }
        }
    }

    #[test]
    fn closed_form_refused_for_half_normal() {
        let m = NullModel::half_normal(1.0).unwrap();
        assert!(RatioDistribution::with_mode(m, EvalMode::ClosedForm).is_err());
    }

    #[test]
    fn change_of_variables() {
        for d in [
            unif(1.0, 5.0),
            RatioDistribution::new(NullModel::half_normal(1.0).unwrap()).unwrap(),
        ] {
            for k in 1..100 {
                let r = k as f64 / 100.0;
                let q = (1.0 - r) / r;
                let via_q = d.ratio_q_pdf(q).unwrap() / (r * r);
                assert_abs_diff_eq!(d.ratio_r_pdf(r).unwrap(), via_q, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn rescaled_space_is_flat_under_own_null() {
        let d = Arc::new(unif(1.0, 3.0));
        let plus = d.plus_transform();
        assert_eq!(d.transform_pdf(&plus, 0.3).unwrap(), 1.0);
        assert_abs_diff_eq!(
            d.bin_mass_analytic(&plus, 0.2, 0.45).unwrap(),
            0.25,
            epsilon = 1e-15
        );
        // exponential intervals seen through the uniform rescaling are not flat
        let e = exp1();
        let m = e.bin_mass_analytic(&plus, 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(m, 0.5, epsilon = 1e-9); // median of q is 1 for both
        let m = e.bin_mass_analytic(&plus, 0.0, 0.1).unwrap();
        let q = invert_law(d.as_ref(), 0.1).unwrap();
        assert_abs_diff_eq!(m, q / (1.0 + q), epsilon = 1e-9);
        let total: f64 = (0..10)
            .map(|k| {
                e.bin_mass_analytic(&d.minus_transform(), k as f64 / 10.0, (k + 1) as f64 / 10.0)
                    .unwrap()
            })
            .sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_mass_in_r_space() {
        for d in [exp1(), unif(0.0, 1.0), unif(1.0, 5.0)] {
            let v = integrate_with_breaks(
                |r| d.ratio_r_pdf(r.clamp(1e-300, 1.0 - 1e-16)).unwrap_or(0.0),
                &[0.0, 1.0 / 6.0, 0.5, 5.0 / 6.0, 1.0],
                1e-12,
            )
            .unwrap()
            .value;
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
        }
    }
}

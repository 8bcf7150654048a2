//! Adaptive Gauss-Kronrod (7/15) quadrature with user-supplied breakpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default panel budget for one integration.
pub const MAX_PANELS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub panels_used: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[lo, hi]` to absolute tolerance `tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::domain(format!(
            "integration bounds must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    integrate_with_breaks(f, &[lo, hi], tol)
}

/// Integrates over `[points[0], points[last]]`, starting with one panel per
/// gap between consecutive breakpoints. Discontinuities and kinks of `f`
/// belong in `points`. Duplicate points are ignored.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: f64,
) -> Result<QuadratureResult> {
    integrate_with_budget(f, points, tol, MAX_PANELS)
}

pub fn integrate_with_budget<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: f64,
    max_panels: usize,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be > 0, got {tol}")));
    }
    if points.len() < 2 || points.iter().any(|p| !p.is_finite()) {
        return Err(Error::domain("need at least two finite breakpoints"));
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("breakpoints must be sorted"));
    }

    let mut panels: Vec<Panel> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gauss_kronrod(&f, w[0], w[1]))
        .collect();
    if panels.is_empty() {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            panels_used: 0,
        });
    }

    loop {
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let value: f64 = panels.iter().map(|p| p.value).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::domain("integrand produced a non-finite value"));
        }
        if error <= tol {
            return Ok(QuadratureResult {
                value,
                abs_error_estimate: error,
                panels_used: panels.len(),
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("non-empty");
        let p = panels[worst];
        let mid = 0.5 * (p.lo + p.hi);
        if panels.len() >= max_panels || !(mid > p.lo && mid < p.hi) {
            return Err(Error::NonConvergence {
                estimate: value,
                abs_error: error,
                panels: panels.len(),
            });
        }
        panels[worst] = gauss_kronrod(&f, p.lo, mid);
        panels.push(gauss_kronrod(&f, mid, p.hi));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_and_linear() {
        let r = integrate_adaptive(|_| 1.0, 0.0, 1.0, 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-14);
        let r = integrate_adaptive(|x| x, 0.0, 2.0, 1e-10).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-14);
        assert!(r.abs_error_estimate <= 1e-10);
    }

    #[test]
    fn heavy_tailed_fraction_density() {
        // antiderivative -1/(1+q)
        let exact = 1.0 - 1.0 / (1.0 + 1e6);
        let r = integrate_adaptive(|q| 1.0 / ((1.0 + q) * (1.0 + q)), 0.0, 1e6, 1e-8).unwrap();
        assert_abs_diff_eq!(r.value, exact, epsilon = 1e-8);
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-5);
    }

    #[test]
    fn breakpoints_handle_jumps() {
        let step = |x: f64| if x < 0.3 { 1.0 } else { 5.0 };
        let r = integrate_with_breaks(step, &[0.0, 0.3, 1.0], 1e-12).unwrap();
        assert_abs_diff_eq!(r.value, 0.3 + 3.5, epsilon = 1e-12);
        assert_eq!(r.panels_used, 2);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let err =
            integrate_with_budget(|x: f64| (1.0 / x).sin(), &[1e-6, 1.0], 1e-14, 8).unwrap_err();
        match err {
            Error::NonConvergence {
                panels, estimate, ..
            } => {
                assert_eq!(panels, 8);
                assert!(estimate.is_finite());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_bounds() {
        assert!(integrate_adaptive(|x| x, 1.0, 1.0, 1e-8).is_err());
        assert!(integrate_adaptive(|x| x, 0.0, 1.0, 0.0).is_err());
    }
}

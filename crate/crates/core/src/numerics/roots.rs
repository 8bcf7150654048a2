use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 300;

/// Finds `x` in `[lo, hi]` with `|f(x) - target| <= tol` for a monotone `f`
/// (either direction). Uses secant steps kept inside the bracket, falling back
/// to bisection whenever the bracket fails to halve.
///
/// On a flat stretch of `f` the returned point is the left end of the
/// bracket the search collapses to.
pub fn invert_monotone<F: Fn(f64) -> f64>(
    f: F,
    target: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::domain(format!(
            "inversion bracket must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !(tol > 0.0) || !target.is_finite() {
        return Err(Error::domain("inversion needs a finite target and tol > 0"));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    let increasing = f_hi >= f_lo;
    let (min, max) = if increasing {
        (f_lo, f_hi)
    } else {
        (f_hi, f_lo)
    };
    if target < min - tol || target > max + tol {
        return Err(Error::domain(format!(
            "target {target} outside the range [{min}, {max}] of the function on [{lo}, {hi}]"
        )));
    }
    if (f_lo - target).abs() <= tol {
        return Ok(lo);
    }
    if (f_hi - target).abs() <= tol {
        return Ok(hi);
    }

    // g < 0 left of the root, g > 0 right of it.
    let sign = if increasing { 1.0 } else { -1.0 };
    let g = |x: f64| sign * (f(x) - target);
    let (mut a, mut b) = (lo, hi);
    let (mut ga, mut gb) = (g(a), g(b));

    // Alternating secant and bisection steps halve the bracket at least every
    // second iteration.
    for iter in 0..MAX_ITERATIONS {
        let mid = 0.5 * (a + b);
        let secant = a - ga * (b - a) / (gb - ga);
        let x = if iter % 2 == 0 && secant > a && secant < b {
            secant
        } else {
            mid
        };
        if !(x > a && x < b) {
            return Ok(a);
        }
        let gx = g(x);
        if gx.abs() <= tol {
            return Ok(x);
        }
        if gx < 0.0 {
            a = x;
            ga = gx;
        } else {
            b = x;
            gb = gx;
        }
    }
    Ok(0.5 * (a + b))
}

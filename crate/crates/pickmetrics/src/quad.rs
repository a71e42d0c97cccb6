//! Adaptive Simpson quadrature with interval bisection to an absolute
//! tolerance. The integrand may fail (e.g. a curve leaving its domain);
//! failures propagate.

use crate::error::{Error, Result};

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> Result<f64>>(
    f: &F,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureNonConvergence {
            tol,
            reached: err.abs() / 15.0,
        });
    }
    let l = recurse(f, a, fa, lm, flm, m, fm, left, tol / 2.0, depth - 1)?;
    let r = recurse(f, m, fm, rm, frm, b, fb, right, tol / 2.0, depth - 1)?;
    Ok(l + r)
}

/// Integrate a fallible integrand over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson_res<F: Fn(f64) -> Result<f64>>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: "tolerance must be positive".into(),
        });
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = simpson(fa, fm, fb, b - a);
    recurse(&f, a, fa, m, fm, b, fb, whole, tol, max_depth)
}

/// Integrate an infallible integrand over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64> {
    adaptive_simpson_res(|x| Ok(f(x)), a, b, tol, max_depth)
}

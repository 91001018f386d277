//! Adaptive Simpson quadrature for the variable-coefficient condition.

use crate::error::{CoreError, Result};

const MAX_DEPTH: u32 = 48;

fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    if !flm.is_finite() || !frm.is_finite() {
        return Err(CoreError::Numerical(format!(
            "integrand not finite near [{a}, {b}]"
        )));
    }
    let left = simpson(a, fa, m, fm, flm);
    let right = simpson(m, fm, b, fb, frm);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(CoreError::Numerical(format!(
            "quadrature did not converge on [{a}, {b}]"
        )));
    }
    let half_tol = 0.5 * tol;
    Ok(recurse(f, a, fa, m, fm, flm, left, half_tol, depth + 1)?
        + recurse(f, m, fm, b, fb, frm, right, half_tol, depth + 1)?)
}

/// `∫_a^b f`, with `b < a` handled by orientation.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return adaptive_simpson(f, b, a, tol).map(|v| -v);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    if !fa.is_finite() || !fb.is_finite() || !fm.is_finite() {
        return Err(CoreError::Numerical(format!(
            "integrand not finite on [{a}, {b}]"
        )));
    }
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 0)
}

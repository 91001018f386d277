//! Residual evaluation of candidate solutions, plus field comparison.
//!
//! The residual of `u` in an equation is
//! `R = i·u_t + u_xx + F(t,x)|u|²u − V(t,x)·u`, with `u_xx` spectral and `u_t`
//! from 5-point central differences in `t` (step `h_scale·(|t|+1)`; decreasing
//! the step below the default trades truncation for roundoff, bottoming out
//! near 1e−11 of the field scale). Residuals are reported raw and relative to
//! `max(|F·|u|³|, |u_xx|)` so the verdict is amplitude-independent.

use num_complex::Complex64;
use serde::Serialize;

use crate::equation::EquationSpec;
use crate::error::{CoreError, Result};
use crate::field::{ComplexField, Grid1D};
use crate::solutions::SolutionFamily;
use crate::solver::Trajectory;

/// Default time-difference step scale for analytic families.
pub const DEFAULT_T_STEP_SCALE: f64 = 1e-5;

/// Relative-residual threshold used for pass/fail decisions.
pub const DEFAULT_RESIDUAL_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualMethod {
    SpectralXFdT,
    AnalyticT,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub equation_label: String,
    pub times_checked: Vec<f64>,
    /// Max of |R| over all grid points and times.
    pub max_residual: f64,
    /// Max over times of the per-time discrete L² norm of R.
    pub l2_residual: f64,
    /// `max(|F|u|³|, |u_xx|)` over all grid points and times.
    pub scale: f64,
    /// `max_residual / scale` (0 when both vanish).
    pub relative: f64,
    pub method: ResidualMethod,
}

impl ResidualReport {
    pub fn passes(&self, threshold: f64) -> bool {
        self.relative <= threshold
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

fn accumulate(
    u: &ComplexField,
    u_t: &[Complex64],
    eq: &EquationSpec,
    t: f64,
    max_res: &mut f64,
    l2_res: &mut f64,
    scale: &mut f64,
) -> Result<()> {
    let grid = *u.grid();
    let u_xx = u.derivative(2)?;
    let i = Complex64::new(0.0, 1.0);
    let mut sum_sq = 0.0;
    for (j, (&uv, (&du, &dxx))) in u
        .values()
        .iter()
        .zip(u_t.iter().zip(u_xx.values()))
        .enumerate()
    {
        let x = grid.point(j);
        let f = eq.f(t, x);
        let v = eq.v(t, x);
        let r = i * du + dxx + f * uv.norm_sqr() * uv - v * uv;
        let rn = r.norm();
        *max_res = max_res.max(rn);
        sum_sq += rn * rn;
        *scale = scale.max((f * uv.norm_sqr() * uv).norm()).max(dxx.norm());
    }
    *l2_res = l2_res.max((grid.spacing() * sum_sq).sqrt());
    Ok(())
}

/// Residual of a closed-form family, with the default time-difference step.
pub fn residual_of_family(
    s: &SolutionFamily,
    eq: &EquationSpec,
    grid: &Grid1D,
    times: &[f64],
) -> Result<ResidualReport> {
    residual_of_family_with_step(s, eq, grid, times, DEFAULT_T_STEP_SCALE)
}

/// Same as [`residual_of_family`] with an explicit time-difference step scale
/// (`h = h_scale·(|t|+1)`).
pub fn residual_of_family_with_step(
    s: &SolutionFamily,
    eq: &EquationSpec,
    grid: &Grid1D,
    times: &[f64],
    h_scale: f64,
) -> Result<ResidualReport> {
    if times.is_empty() {
        return Err(CoreError::Config("no times to check".into()));
    }
    let mut max_res = 0.0;
    let mut l2_res = 0.0;
    let mut scale = 0.0;
    for &t in times {
        let h = h_scale * (t.abs() + 1.0);
        // The full 5-point stencil must sit inside the validity window.
        for &tt in &[t - 2.0 * h, t - h, t, t + h, t + 2.0 * h] {
            if !s.valid_at(tt) {
                return Err(CoreError::Domain(format!(
                    "stencil time {tt} outside family validity ({})",
                    s.validity_desc()
                )));
            }
        }
        if !eq.time_domain().contains(t) {
            return Err(CoreError::Domain(format!(
                "t = {t} outside the domain of equation '{}'",
                eq.label()
            )));
        }
        let u = s.evaluate_on_grid(grid, t)?;
        let um2 = s.evaluate_on_grid(grid, t - 2.0 * h)?;
        let um1 = s.evaluate_on_grid(grid, t - h)?;
        let up1 = s.evaluate_on_grid(grid, t + h)?;
        let up2 = s.evaluate_on_grid(grid, t + 2.0 * h)?;
        // 4th-order central difference.
        let u_t: Vec<Complex64> = (0..grid.n_points())
            .map(|j| {
                (um2.values()[j] - up2.values()[j] + 8.0 * (up1.values()[j] - um1.values()[j]))
                    / (12.0 * h)
            })
            .collect();
        accumulate(&u, &u_t, eq, t, &mut max_res, &mut l2_res, &mut scale)?;
    }
    let relative = if max_res == 0.0 { 0.0 } else { max_res / scale };
    Ok(ResidualReport {
        equation_label: eq.label().to_string(),
        times_checked: times.to_vec(),
        max_residual: max_res,
        l2_residual: l2_res,
        scale,
        relative,
        method: ResidualMethod::SpectralXFdT,
    })
}

/// Residual of a computed trajectory at its interior snapshot times, using
/// snapshot-to-snapshot time differences (second order in the snapshot
/// spacing).
pub fn residual_of_trajectory(tr: &Trajectory, eq: &EquationSpec) -> Result<ResidualReport> {
    let snaps = tr.snapshots();
    let times = tr.times();
    if snaps.len() < 3 {
        return Err(CoreError::Config(format!(
            "trajectory has {} snapshots; need at least 3 for time differencing",
            snaps.len()
        )));
    }
    let grid = *snaps[0].grid();
    let mut max_res = 0.0;
    let mut l2_res = 0.0;
    let mut scale = 0.0;
    let mut checked = Vec::new();
    for i in 1..snaps.len() - 1 {
        let t = times[i];
        let h1 = times[i] - times[i - 1];
        let h2 = times[i + 1] - times[i];
        // Non-uniform 3-point central difference.
        let c_m = -h2 / (h1 * (h1 + h2));
        let c_0 = (h2 - h1) / (h1 * h2);
        let c_p = h1 / (h2 * (h1 + h2));
        let u_t: Vec<Complex64> = (0..grid.n_points())
            .map(|j| {
                c_m * snaps[i - 1].values()[j]
                    + c_0 * snaps[i].values()[j]
                    + c_p * snaps[i + 1].values()[j]
            })
            .collect();
        accumulate(
            &snaps[i],
            &u_t,
            eq,
            t,
            &mut max_res,
            &mut l2_res,
            &mut scale,
        )?;
        checked.push(t);
    }
    let relative = if max_res == 0.0 { 0.0 } else { max_res / scale };
    Ok(ResidualReport {
        equation_label: eq.label().to_string(),
        times_checked: checked,
        max_residual: max_res,
        l2_residual: l2_res,
        scale,
        relative,
        method: ResidualMethod::SpectralXFdT,
    })
}

/// Max-norm difference of two fields on the same grid at the same time.
///
/// With `mod_global_phase` the difference is minimized over a single global
/// phase first (the L²-optimal phase from the inner product), since solutions
/// are defined up to a constant phase.
pub fn compare_fields(a: &ComplexField, b: &ComplexField, mod_global_phase: bool) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(CoreError::Config("field grids differ".into()));
    }
    if (a.time() - b.time()).abs() > 1e-12 * (1.0 + a.time().abs()) {
        return Err(CoreError::Config(format!(
            "field times differ: {} vs {}",
            a.time(),
            b.time()
        )));
    }
    let phase = if mod_global_phase {
        let inner: Complex64 = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(av, bv)| av * bv.conj())
            .sum();
        if inner.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, inner.arg())
        }
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(av, bv)| (av - phase * bv).norm())
        .fold(0.0, f64::max))
}

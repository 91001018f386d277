//! The order-k recurrence of the WTC expansion, implemented directly.
//!
//! Substituting `u = Σ u_n ξ^{n−1}`, `v = Σ v_n ξ^{n−1}` into the equation
//! pair and collecting `ξ^k` gives, for each k ≥ −3,
//!
//! ```text
//!   i(u_{k+1,t} + (k+1)u_{k+2}ξ_t) + (k+2)(k+1)u_{k+3} + F Σ_{i+j+l=k+3} u_i u_j v_l = 0
//!  −i(v_{k+1,t} + (k+1)v_{k+2}ξ_t) + (k+2)(k+1)v_{k+3} + F Σ_{i+j+l=k+3} v_i v_j u_l = 0
//! ```
//!
//! The k = −2 and k = −1 instances define `u1, v1` and `u2, v2`; evaluating
//! them on the coefficients produced by [`super::wtc_coefficients`] is an
//! independent confirmation of the transcription of those solutions (the
//! time derivatives here use a different step than the solve, so the check
//! is not circular). The k = 0 and k = 1 instances yield the inhomogeneous
//! parts `A₃, B₃, A₄, B₄` of the singular resonance systems; deriving them
//! here validates the closed forms used by the residual operations. Indices
//! above n = 4 are not implemented.

use num_complex::Complex64;

use crate::error::Result;

use super::{fd5_c, wtc_coefficients, CoefficientF, SingularManifold, TimeFn, FD_STEP_SCALE};

/// Residuals of the k = −2 and k = −1 recurrence instances (both equations
/// of each), with the max magnitude of the terms entering them.
#[derive(Debug, Clone, Copy)]
pub struct RecurrenceResidual {
    pub k_minus_2: f64,
    pub k_minus_1: f64,
    pub scale: f64,
}

impl RecurrenceResidual {
    pub fn max_abs(&self) -> f64 {
        self.k_minus_2.max(self.k_minus_1)
    }

    pub fn within(&self, tolerance: f64) -> bool {
        self.max_abs() <= tolerance * self.scale
    }
}

/// Substitute the n ≤ 2 coefficients back into the k = −2, −1 recurrence.
pub fn recurrence_residual(
    f: &CoefficientF,
    m: &SingularManifold,
    u0: &TimeFn,
    times: &[f64],
) -> Result<RecurrenceResidual> {
    let c = wtc_coefficients(f, m, u0, times)?;
    let i = Complex64::new(0.0, 1.0);
    let mut r2 = 0.0_f64;
    let mut r1 = 0.0_f64;
    let mut scale = 0.0_f64;

    for &t in times {
        let fv = f.value(t);
        let xi_t = m.xi_t(t);
        let u0v = (c.u0)(t);
        let v0v = (c.v0)(t);
        let u1v = (c.u1)(t);
        let v1v = (c.v1)(t);
        let u2v = (c.u2)(t);
        let v2v = (c.v2)(t);

        // k = −2: terms of ξ^{−2}. Σ_{i+j+l=1}: 2u1u0v0 + u0²v1 (u-equation).
        let eq_u = -i * u0v * xi_t + fv * (2.0 * u1v * u0v * v0v + u0v * u0v * v1v);
        let eq_v = i * v0v * xi_t + fv * (2.0 * v1v * v0v * u0v + v0v * v0v * u1v);
        r2 = r2.max(eq_u.norm()).max(eq_v.norm());
        scale = scale
            .max((u0v * xi_t).norm())
            .max((fv * 2.0 * u1v * u0v * v0v).norm())
            .max((fv * u0v * u0v * v1v).norm());

        // k = −1 needs u0,t and v0,t; use half the solve step so the check
        // is independent of the solve's differencing.
        let h = 0.5 * FD_STEP_SCALE * (1.0 + t.abs());
        let u0t = fd5_c(&*c.u0, t, h);
        let v0t = fd5_c(&*c.v0, t, h);

        // Σ_{i+j+l=2}: 2u2u0v0 + u0²v2 + u1²v0 + 2u0u1v1 (u-equation).
        let sum_u =
            2.0 * u2v * u0v * v0v + u0v * u0v * v2v + u1v * u1v * v0v + 2.0 * u0v * u1v * v1v;
        let sum_v =
            2.0 * v2v * v0v * u0v + v0v * v0v * u2v + v1v * v1v * u0v + 2.0 * v0v * v1v * u1v;
        let eq_u = i * u0t + fv * sum_u;
        let eq_v = -i * v0t + fv * sum_v;
        r1 = r1.max(eq_u.norm()).max(eq_v.norm());
        scale = scale
            .max(u0t.norm())
            .max((fv * 2.0 * u2v * u0v * v0v).norm())
            .max((fv * u0v * u0v * v2v).norm())
            .max((fv * u1v * u1v * v0v).norm())
            .max((fv * 2.0 * u0v * u1v * v1v).norm());
    }

    Ok(RecurrenceResidual {
        k_minus_2: r2,
        k_minus_1: r1,
        scale,
    })
}

/// The inhomogeneous parts of the n = 3 and n = 4 resonance systems at one
/// sample time, derived from the recurrence rather than the closed forms.
#[derive(Debug, Clone, Copy)]
pub struct ResonanceSystems {
    pub a3: Complex64,
    pub b3: Complex64,
    pub a4: Complex64,
    pub b4: Complex64,
    /// The v₃ completing the chosen u₃ in the (singular) n = 3 system.
    pub v3: Complex64,
}

/// Derive `A₃, B₃` (k = 0) and `A₄, B₄` (k = 1) numerically.
///
/// `u3` is the free n = 3 resonance coefficient; `v3` is completed from the
/// first row of the n = 3 system. `A₄` and `B₄` are independent of the
/// choice of `u3` (the dependence cancels through `v3`), which the tests
/// exercise by varying it.
pub fn resonance_systems_via_recurrence(
    f: &CoefficientF,
    m: &SingularManifold,
    u0: &TimeFn,
    u3: Complex64,
    t: f64,
) -> Result<ResonanceSystems> {
    let c = wtc_coefficients(f, m, u0, &[t])?;
    let i = Complex64::new(0.0, 1.0);
    let fv = f.value(t);
    let xi_t = m.xi_t(t);

    let u0v = (c.u0)(t);
    let v0v = (c.v0)(t);
    let u1v = (c.u1)(t);
    let v1v = (c.v1)(t);
    let u2v = (c.u2)(t);
    let v2v = (c.v2)(t);

    let h = 0.5 * FD_STEP_SCALE * (1.0 + t.abs());
    let u1t = fd5_c(&*c.u1, t, h);
    let v1t = fd5_c(&*c.v1, t, h);
    let u2t = fd5_c(&*c.u2, t, h);
    let v2t = fd5_c(&*c.v2, t, h);

    // k = 0 (n = 3): below-resonance sums Σ_{i+j+l=3} without index-3 terms.
    let sum3_u =
        u1v * u1v * v1v + 2.0 * u1v * u2v * v0v + 2.0 * u0v * u2v * v1v + 2.0 * u0v * u1v * v2v;
    let sum3_v =
        v1v * v1v * u1v + 2.0 * v1v * v2v * u0v + 2.0 * v0v * v2v * u1v + 2.0 * v0v * v1v * u2v;
    let a3 = -i * (u1t + u2v * xi_t) - fv * sum3_u;
    let b3 = i * (v1t + v2v * xi_t) - fv * sum3_v;

    // Complete v3 from the first row: −2u3 + F·u0²·v3 = A₃.
    let v3 = (a3 + 2.0 * u3) / (fv * u0v * u0v);

    // k = 1 (n = 4).
    let sum4_u = u2v * u2v * v0v
        + u1v * u1v * v2v
        + 2.0 * u1v * u3 * v0v
        + 2.0 * u1v * u2v * v1v
        + 2.0 * u0v * u3 * v1v
        + 2.0 * u0v * u2v * v2v
        + 2.0 * u0v * u1v * v3;
    let sum4_v = v2v * v2v * u0v
        + v1v * v1v * u2v
        + 2.0 * v1v * v3 * u0v
        + 2.0 * v1v * v2v * u1v
        + 2.0 * v0v * v3 * u1v
        + 2.0 * v0v * v2v * u2v
        + 2.0 * v0v * v1v * u3;
    let a4 = -i * (u2t + 2.0 * u3 * xi_t) - fv * sum4_u;
    let b4 = i * (v2t + 2.0 * v3 * xi_t) - fv * sum4_v;

    Ok(ResonanceSystems { a3, b3, a4, b4, v3 })
}

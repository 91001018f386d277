//! Closed-form solution families, exactly evaluable at any `(t, x)`.
//!
//! Families are closures, never pre-sampled, so transform composition stays
//! exact and interpolation error enters only when a sampled field is
//! requested. Each family carries the equation it solves and its time
//! validity window; evaluation outside the window is a domain error rather
//! than a NaN (the `1/t` and `1/√t` factors of the time-rescaled soliton are
//! genuine singularities).

use std::sync::Arc;

use num_complex::Complex64;

use crate::equation::EquationSpec;
use crate::error::{CoreError, Result};
use crate::field::{ComplexField, Grid1D};

pub type Evaluator = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;
pub type TimePredicate = Arc<dyn Fn(f64) -> bool + Send + Sync>;

/// Parameters of the travelling soliton: position offset `x0`, wavenumber
/// `k`, frequency parameter `v`, amplitude `a = √(k²+v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonParams {
    pub x0: f64,
    pub k: f64,
    pub v: f64,
}

impl SolitonParams {
    pub fn new(x0: f64, k: f64, v: f64) -> Result<Self> {
        let p = SolitonParams { x0, k, v };
        if p.k * p.k + p.v <= 0.0 {
            return Err(CoreError::Parameter(format!(
                "k^2 + v = {} must be positive for a real amplitude",
                p.k * p.k + p.v
            )));
        }
        Ok(p)
    }

    pub fn amplitude(&self) -> f64 {
        (self.k * self.k + self.v).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Standing,
    Travelling,
    DTransformedStanding,
    Custom,
}

/// A closed-form solution `(t,x) → ℂ` of a declared equation.
#[derive(Clone)]
pub struct SolutionFamily {
    kind: FamilyKind,
    params: Option<SolitonParams>,
    evaluate: Evaluator,
    validity: TimePredicate,
    validity_desc: String,
    equation: EquationSpec,
}

impl std::fmt::Debug for SolutionFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolutionFamily")
            .field("kind", &self.kind)
            .field("params", &self.params)
            .field("validity", &self.validity_desc)
            .field("equation", &self.equation.label().to_string())
            .finish()
    }
}

impl SolutionFamily {
    pub fn custom(
        evaluate: Evaluator,
        validity: TimePredicate,
        validity_desc: impl Into<String>,
        equation: EquationSpec,
    ) -> SolutionFamily {
        SolutionFamily {
            kind: FamilyKind::Custom,
            params: None,
            evaluate,
            validity,
            validity_desc: validity_desc.into(),
            equation,
        }
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn params(&self) -> Option<SolitonParams> {
        self.params
    }

    pub fn equation(&self) -> &EquationSpec {
        &self.equation
    }

    pub fn validity_desc(&self) -> &str {
        &self.validity_desc
    }

    pub fn valid_at(&self, t: f64) -> bool {
        (self.validity)(t)
    }

    pub(crate) fn validity(&self) -> TimePredicate {
        Arc::clone(&self.validity)
    }

    pub(crate) fn evaluator(&self) -> Evaluator {
        Arc::clone(&self.evaluate)
    }

    /// Evaluate at `(t, x)`, checking the time validity window.
    pub fn evaluate(&self, t: f64, x: f64) -> Result<Complex64> {
        if !self.valid_at(t) {
            return Err(CoreError::Domain(format!(
                "t = {t} outside validity window ({})",
                self.validity_desc
            )));
        }
        Ok((self.evaluate)(t, x))
    }

    /// Sample the family exactly at the grid nodes (no interpolation).
    pub fn evaluate_on_grid(&self, grid: &Grid1D, t: f64) -> Result<ComplexField> {
        if !self.valid_at(t) {
            return Err(CoreError::Domain(format!(
                "t = {t} outside validity window ({})",
                self.validity_desc
            )));
        }
        ComplexField::from_fn(*grid, t, |x| (self.evaluate)(t, x))
    }
}

/// Standing soliton `U₀(t,x) = √2·e^{it}/cosh(x−x₀)` of the cubic NLS with
/// unit coupling.
pub fn standing_soliton(x0: f64) -> SolutionFamily {
    standing_soliton_with_coupling(x0, 1.0).expect("unit coupling is valid")
}

/// Standing soliton `√(2/F₀)·e^{it}/cosh(x−x₀)` normalized so that it solves
/// the cubic NLS with constant coupling `F₀ > 0`.
pub fn standing_soliton_with_coupling(x0: f64, coupling: f64) -> Result<SolutionFamily> {
    if coupling <= 0.0 {
        return Err(CoreError::Parameter(format!(
            "coupling {coupling} must be positive"
        )));
    }
    let amp = (2.0 / coupling).sqrt();
    Ok(SolutionFamily {
        kind: FamilyKind::Standing,
        params: None,
        evaluate: Arc::new(move |t, x| Complex64::from_polar(amp / (x - x0).cosh(), t)),
        validity: Arc::new(|_| true),
        validity_desc: "all t".into(),
        equation: EquationSpec::constant(coupling),
    })
}

/// Travelling soliton of the unit-coupling cubic NLS,
/// `U(t,x) = e^{i(vt−kx)}·√2·a / cosh(a(x + 2kt − x₀))`, `a = √(k²+v)`.
///
/// The envelope drifts at velocity `−2k`, the Galilean boost of the standing
/// soliton consistent with the phase `e^{−ikx}`.
pub fn travelling_soliton(p: SolitonParams) -> Result<SolutionFamily> {
    if p.k * p.k + p.v <= 0.0 {
        return Err(CoreError::Parameter(format!(
            "k^2 + v = {} must be positive",
            p.k * p.k + p.v
        )));
    }
    let a = p.amplitude();
    let rt2a = 2.0_f64.sqrt() * a;
    Ok(SolutionFamily {
        kind: FamilyKind::Travelling,
        params: Some(p),
        evaluate: Arc::new(move |t, x| {
            let envelope = rt2a / (a * (x + 2.0 * p.k * t - p.x0)).cosh();
            Complex64::from_polar(envelope, p.v * t - p.k * x)
        }),
        validity: Arc::new(|_| true),
        validity_desc: "all t".into(),
        equation: EquationSpec::constant(1.0),
    })
}

/// Soliton of the time-decaying equation (`F = 1/t`):
/// `u₀(t,x) = e^{i(x²/4t − 1/t)}/√t · √2/cosh(x/t + x₀)`, valid for `t > 0`.
pub fn d_transformed_soliton(x0: f64) -> SolutionFamily {
    let rt2 = 2.0_f64.sqrt();
    SolutionFamily {
        kind: FamilyKind::DTransformedStanding,
        params: None,
        evaluate: Arc::new(move |t, x| {
            let modulus = rt2 / (t.sqrt() * (x / t + x0).cosh());
            Complex64::from_polar(modulus, x * x / (4.0 * t) - 1.0 / t)
        }),
        validity: Arc::new(|t| t > 0.0),
        validity_desc: "t > 0".into(),
        equation: EquationSpec::reciprocal_time(),
    }
}

/// Free Gaussian wave packet `(1+4it)^{−1/2}·exp[−x²/(1+4it)]`, an exact
/// solution of the free linear equation `i u_t + u_xx = 0`; used as the
/// reference solution in linear intertwining checks.
pub fn gaussian_packet() -> SolutionFamily {
    SolutionFamily {
        kind: FamilyKind::Custom,
        params: None,
        evaluate: Arc::new(|t, x| {
            let a = Complex64::new(1.0, 4.0 * t);
            (-x * x / a).exp() / a.sqrt()
        }),
        validity: Arc::new(|_| true),
        validity_desc: "all t".into(),
        equation: EquationSpec::free_linear(),
    }
}

//! Equation descriptors: the coefficient functions of
//! `i u_t + u_xx + F(t,x)|u|²u − V(t,x) u = 0` together with the time domain
//! on which they are finite.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

type Coeff = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Times at which an equation's coefficients are defined.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeDomain {
    All,
    /// `t > a` (exclusive).
    Above(f64),
    /// `t ≠ s` — an isolated coefficient singularity.
    Excluding(f64),
    /// `cos(ωt) ≠ 0`.
    CosNonzero {
        omega: f64,
    },
}

impl TimeDomain {
    pub fn contains(&self, t: f64) -> bool {
        match *self {
            TimeDomain::All => true,
            TimeDomain::Above(a) => t > a,
            TimeDomain::Excluding(s) => t != s,
            TimeDomain::CosNonzero { omega } => (omega * t).cos().abs() > 1e-12,
        }
    }

    /// True when the whole closed interval `[a, b]` avoids every singularity.
    pub fn contains_interval(&self, a: f64, b: f64) -> bool {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        match *self {
            TimeDomain::All => true,
            TimeDomain::Above(c) => a > c,
            TimeDomain::Excluding(s) => !(a <= s && s <= b),
            TimeDomain::CosNonzero { omega } => {
                // Zeros of cos(ωt) at t = (π/2 + mπ)/ω.
                let m = ((a * omega - FRAC_PI_2) / PI).ceil();
                let first_zero = (FRAC_PI_2 + m * PI) / omega;
                first_zero > b
            }
        }
    }
}

/// Coefficient functions `F(t,x)` and `V(t,x)` of one equation, with a label
/// recording which normalization is in force.
#[derive(Clone)]
pub struct EquationSpec {
    label: String,
    f: Coeff,
    v: Coeff,
    time_domain: TimeDomain,
    x_dependent_potential: bool,
    /// `Some(F)` when `F` is a constant and `V ≡ 0`, so the energy functional
    /// `∫(|u_x|² − (F/2)|u|⁴)dx` is conserved and worth reporting.
    constant_coupling: Option<f64>,
}

impl fmt::Debug for EquationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EquationSpec")
            .field("label", &self.label)
            .field("time_domain", &self.time_domain)
            .finish()
    }
}

impl EquationSpec {
    /// Constant-coefficient cubic NLS `i u_t + u_xx + F₀|u|²u = 0`
    /// (`F₀ = 0` gives the free linear equation).
    pub fn constant(coupling: f64) -> EquationSpec {
        EquationSpec {
            label: format!("F={coupling}"),
            f: Arc::new(move |_, _| coupling),
            v: Arc::new(|_, _| 0.0),
            time_domain: TimeDomain::All,
            x_dependent_potential: false,
            constant_coupling: Some(coupling),
        }
    }

    pub fn free_linear() -> EquationSpec {
        EquationSpec::constant(0.0)
    }

    /// Time-decaying coupling `F = 1/t`, singular at `t = 0`.
    pub fn reciprocal_time() -> EquationSpec {
        EquationSpec {
            label: "F=1/t".into(),
            f: Arc::new(|t, _| 1.0 / t),
            v: Arc::new(|_, _| 0.0),
            time_domain: TimeDomain::Excluding(0.0),
            x_dependent_potential: false,
            constant_coupling: None,
        }
    }

    /// Uniform force field: `F = 2`, `V = 2αx`.
    pub fn linear_potential(alpha: f64) -> EquationSpec {
        EquationSpec {
            label: format!("F=2, V=2*{alpha}*x"),
            f: Arc::new(|_, _| 2.0),
            v: Arc::new(move |_, x| 2.0 * alpha * x),
            time_domain: TimeDomain::All,
            x_dependent_potential: alpha != 0.0,
            constant_coupling: None,
        }
    }

    /// Oscillator NLS: `F = 1/cos(ωt)`, `V = ω²x²/4`.
    pub fn oscillator(omega: f64) -> EquationSpec {
        EquationSpec {
            label: format!("F=1/cos({omega}t), V={omega}^2*x^2/4"),
            f: Arc::new(move |t, _| 1.0 / (omega * t).cos()),
            v: Arc::new(move |_, x| omega * omega * x * x / 4.0),
            time_domain: TimeDomain::CosNonzero { omega },
            x_dependent_potential: true,
            constant_coupling: None,
        }
    }

    /// Linear oscillator equation: `F = 0`, `V = ω²x²/4`.
    pub fn linear_oscillator(omega: f64) -> EquationSpec {
        EquationSpec {
            label: format!("F=0, V={omega}^2*x^2/4"),
            f: Arc::new(|_, _| 0.0),
            v: Arc::new(move |_, x| omega * omega * x * x / 4.0),
            time_domain: TimeDomain::All,
            x_dependent_potential: true,
            constant_coupling: None,
        }
    }

    /// General constructor for callers outside the built-in catalog.
    pub fn custom(
        label: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        v: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        time_domain: TimeDomain,
        x_dependent_potential: bool,
    ) -> EquationSpec {
        EquationSpec {
            label: label.into(),
            f: Arc::new(f),
            v: Arc::new(v),
            time_domain,
            x_dependent_potential,
            constant_coupling: None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn f(&self, t: f64, x: f64) -> f64 {
        (self.f)(t, x)
    }

    pub fn v(&self, t: f64, x: f64) -> f64 {
        (self.v)(t, x)
    }

    pub fn time_domain(&self) -> &TimeDomain {
        &self.time_domain
    }

    pub fn has_x_dependent_potential(&self) -> bool {
        self.x_dependent_potential
    }

    pub fn constant_coupling(&self) -> Option<f64> {
        self.constant_coupling
    }
}

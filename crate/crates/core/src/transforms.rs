//! Conformal space-time transformations acting on solutions.
//!
//! A transform is a coordinate pair map `(t,x) → (T,X)` fibered over time
//! (`T` depends on `t` alone), a complex multiplier, and a validity window.
//! It acts on solutions by pull-back,
//!
//! ```text
//!   u(t, x) = multiplier(t, x) · U(T(t), X(t, x)),
//! ```
//!
//! carrying solutions `U` of `equation_out` to solutions `u` of
//! `equation_in`. The intertwining claims are verified numerically by the
//! residual tests, not trusted; multipliers are stored in pull-back form so
//! that composition, inversion and the group laws are exact.
//!
//! The time-inversion map factors exactly as a time translation, an
//! expansion and a second time translation; the square roots in the
//! expansion multiplier follow the modulus convention `|1−κt|^{∓1/2}` so the
//! factorization holds on the `1−κt < 0` leg it passes through.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::equation::EquationSpec;
use crate::error::{CoreError, Result};
use crate::field::{ComplexField, Grid1D};
use crate::solutions::SolutionFamily;

type CoordMap = Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>;
type Multiplier = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;
type Validity = Arc<dyn Fn(f64) -> bool + Send + Sync>;

/// Spectral-tail fraction treated as "near the resolution limit" by
/// `push_field`: modes in the top eighth of |k|.
const BAND_TAIL_FRACTION: f64 = 0.125;
/// Relative tail magnitude above which a resampling accuracy warning is
/// attached.
const BAND_TAIL_WARN: f64 = 1e-10;

/// Serializable description of a transform.
#[derive(Debug, Clone, Serialize)]
pub struct TransformInfo {
    pub name: String,
    pub parameters: Vec<(String, f64)>,
    pub validity: String,
}

/// A sampled field produced by `push_field`, with any accuracy warnings.
#[derive(Debug, Clone)]
pub struct FieldPush {
    pub field: ComplexField,
    pub warnings: Vec<String>,
}

#[derive(Clone)]
pub struct SpacetimeTransform {
    name: String,
    parameters: Vec<(String, f64)>,
    coord: CoordMap,
    inverse_coord: CoordMap,
    multiplier: Multiplier,
    validity: Validity,
    validity_desc: String,
    equation_in: EquationSpec,
    equation_out: EquationSpec,
}

impl std::fmt::Debug for SpacetimeTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpacetimeTransform")
            .field("name", &self.name)
            .field("parameters", &self.parameters)
            .field("validity", &self.validity_desc)
            .finish()
    }
}

impl SpacetimeTransform {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn equation_in(&self) -> &EquationSpec {
        &self.equation_in
    }

    pub fn equation_out(&self) -> &EquationSpec {
        &self.equation_out
    }

    pub fn validity_desc(&self) -> &str {
        &self.validity_desc
    }

    pub fn valid_at(&self, t: f64) -> bool {
        (self.validity)(t)
    }

    /// `(T, X)` image of `(t, x)`; domain error outside the validity window.
    pub fn map_coords(&self, t: f64, x: f64) -> Result<(f64, f64)> {
        if !self.valid_at(t) {
            return Err(CoreError::Domain(format!(
                "t = {t} outside validity of {} ({})",
                self.name, self.validity_desc
            )));
        }
        Ok((self.coord)(t, x))
    }

    /// Preimage of `(T, X)` under the coordinate map.
    pub fn unmap_coords(&self, big_t: f64, big_x: f64) -> (f64, f64) {
        (self.inverse_coord)(big_t, big_x)
    }

    /// Pull-back multiplier at `(t, x)`.
    pub fn multiplier(&self, t: f64, x: f64) -> Result<Complex64> {
        if !self.valid_at(t) {
            return Err(CoreError::Domain(format!(
                "t = {t} outside validity of {} ({})",
                self.name, self.validity_desc
            )));
        }
        Ok((self.multiplier)(t, x))
    }

    pub fn describe(&self) -> TransformInfo {
        TransformInfo {
            name: self.name.clone(),
            parameters: self.parameters.clone(),
            validity: self.validity_desc.clone(),
        }
    }

    /// Transform applying `self` first, then `outer`, as coordinate maps:
    /// the composite coordinate map is `outer.coord ∘ self.coord` and the
    /// multiplier picks up `outer`'s factor at the mapped point.
    pub fn then(&self, outer: &SpacetimeTransform) -> SpacetimeTransform {
        let coord_a = Arc::clone(&self.coord);
        let coord_b = Arc::clone(&outer.coord);
        let inv_a = Arc::clone(&self.inverse_coord);
        let inv_b = Arc::clone(&outer.inverse_coord);
        let mult_a = Arc::clone(&self.multiplier);
        let mult_b = Arc::clone(&outer.multiplier);
        let valid_a = Arc::clone(&self.validity);
        let valid_b = Arc::clone(&outer.validity);
        let coord_a2 = Arc::clone(&self.coord);

        SpacetimeTransform {
            name: format!("{} then {}", self.name, outer.name),
            parameters: self
                .parameters
                .iter()
                .chain(outer.parameters.iter())
                .cloned()
                .collect(),
            coord: Arc::new(move |t, x| {
                let (t1, x1) = coord_a(t, x);
                coord_b(t1, x1)
            }),
            inverse_coord: Arc::new(move |t, x| {
                let (t1, x1) = inv_b(t, x);
                inv_a(t1, x1)
            }),
            multiplier: Arc::new(move |t, x| {
                let (t1, x1) = coord_a2(t, x);
                mult_a(t, x) * mult_b(t1, x1)
            }),
            validity: {
                let coord_a3 = Arc::clone(&self.coord);
                Arc::new(move |t| valid_a(t) && valid_b(coord_a3(t, 0.0).0))
            },
            validity_desc: format!(
                "({}) and image in ({})",
                self.validity_desc, outer.validity_desc
            ),
            equation_in: self.equation_in.clone(),
            equation_out: outer.equation_out.clone(),
        }
    }

    /// Inverse transform: swapped coordinate maps, reciprocal multiplier
    /// carried through the inverse map, swapped equations.
    pub fn inverse(&self) -> SpacetimeTransform {
        let coord = Arc::clone(&self.coord);
        let inv = Arc::clone(&self.inverse_coord);
        let inv2 = Arc::clone(&self.inverse_coord);
        let mult = Arc::clone(&self.multiplier);
        let valid = Arc::clone(&self.validity);
        SpacetimeTransform {
            name: format!("inverse {}", self.name),
            parameters: self.parameters.clone(),
            coord: inv,
            inverse_coord: coord,
            multiplier: Arc::new(move |big_t, big_x| {
                let (t, x) = inv2(big_t, big_x);
                1.0 / mult(t, x)
            }),
            validity: {
                let inv3 = Arc::clone(&self.inverse_coord);
                Arc::new(move |big_t| valid(inv3(big_t, 0.0).0))
            },
            validity_desc: format!("preimage in ({})", self.validity_desc),
            equation_in: self.equation_out.clone(),
            equation_out: self.equation_in.clone(),
        }
    }

    /// Pull a solution family of `equation_out` back to a family of
    /// `equation_in`: `u(t,x) = multiplier(t,x) · s(T(t), X(t,x))`.
    /// Validity is the intersection of the transform's window with the
    /// preimage of the family's window.
    pub fn pull_back(&self, s: &SolutionFamily) -> SolutionFamily {
        let coord = Arc::clone(&self.coord);
        let coord2 = Arc::clone(&self.coord);
        let mult = Arc::clone(&self.multiplier);
        let valid = Arc::clone(&self.validity);
        let s_eval = s.evaluator();
        let s_valid = s.validity();
        SolutionFamily::custom(
            Arc::new(move |t, x| {
                let (big_t, big_x) = coord(t, x);
                mult(t, x) * s_eval(big_t, big_x)
            }),
            Arc::new(move |t| valid(t) && s_valid(coord2(t, 0.0).0)),
            format!(
                "({}) and image in ({})",
                self.validity_desc,
                s.validity_desc()
            ),
            self.equation_in.clone(),
        )
    }

    /// Sampled-field counterpart of [`Self::pull_back`]: given a field of the
    /// `equation_out` solution at time `T₀`, produce the transformed field on
    /// `target_grid` at the unique time `t₀` with `T(t₀) = T₀`, resampling
    /// trigonometrically at the mapped positions.
    pub fn push_field(&self, f: &ComplexField, target_grid: &Grid1D) -> Result<FieldPush> {
        let t0 = self.unmap_coords(f.time(), 0.0).0;
        if !t0.is_finite() || !self.valid_at(t0) {
            return Err(CoreError::Domain(format!(
                "time {} has no valid preimage under {} ({})",
                f.time(),
                self.name,
                self.validity_desc
            )));
        }
        let round_trip = (self.coord)(t0, 0.0).0;
        if (round_trip - f.time()).abs() > 1e-9 * (1.0 + f.time().abs()) {
            return Err(CoreError::Domain(format!(
                "time {} does not map back consistently under {} (got {})",
                f.time(),
                self.name,
                round_trip
            )));
        }

        let mut warnings = Vec::new();
        let spectrum = f.to_spectrum();
        let n = f.grid().n_points();
        let tail_cut = ((n / 2) as f64 * (1.0 - BAND_TAIL_FRACTION)) as i64;
        let mut peak = 0.0_f64;
        let mut tail = 0.0_f64;
        for (j, m) in spectrum.modes().iter().enumerate() {
            let k = f.grid().signed_wavenumber(j).abs();
            peak = peak.max(m.norm());
            if k >= tail_cut {
                tail = tail.max(m.norm());
            }
        }
        if peak > 0.0 && tail > BAND_TAIL_WARN * peak {
            warnings.push(format!(
                "input spectrum carries {:.3e} of its peak in the top {:.0}% of wavenumbers; \
                 resampled values may be inaccurate at that level",
                tail / peak,
                100.0 * BAND_TAIL_FRACTION
            ));
        }

        let points: Vec<f64> = (0..target_grid.n_points())
            .map(|i| {
                let x = target_grid.point(i);
                (self.coord)(t0, x).1
            })
            .collect();
        let sampled = f.resample(&points);
        let values: Vec<Complex64> = sampled
            .iter()
            .enumerate()
            .map(|(i, v)| (self.multiplier)(t0, target_grid.point(i)) * v)
            .collect();
        Ok(FieldPush {
            field: ComplexField::new(*target_grid, t0, values)?,
            warnings,
        })
    }
}

/// The identity transform.
pub fn identity() -> SpacetimeTransform {
    SpacetimeTransform {
        name: "identity".into(),
        parameters: vec![],
        coord: Arc::new(|t, x| (t, x)),
        inverse_coord: Arc::new(|t, x| (t, x)),
        multiplier: Arc::new(|_, _| Complex64::new(1.0, 0.0)),
        validity: Arc::new(|_| true),
        validity_desc: "all t".into(),
        equation_in: EquationSpec::free_linear(),
        equation_out: EquationSpec::free_linear(),
    }
}

/// Dilatation `(T,X) = (δ²t, δx)` with multiplier `δ^{1/2}`; `δ ≠ 0`.
pub fn dilatation(delta: f64) -> Result<SpacetimeTransform> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(CoreError::Parameter(
            "dilatation parameter must be nonzero".into(),
        ));
    }
    let mult = Complex64::from(delta).sqrt();
    Ok(SpacetimeTransform {
        name: "dilatation".into(),
        parameters: vec![("delta".into(), delta)],
        coord: Arc::new(move |t, x| (delta * delta * t, delta * x)),
        inverse_coord: Arc::new(move |t, x| (t / (delta * delta), x / delta)),
        multiplier: Arc::new(move |_, _| mult),
        validity: Arc::new(|_| true),
        validity_desc: "all t".into(),
        equation_in: EquationSpec::free_linear(),
        equation_out: EquationSpec::free_linear(),
    })
}

/// Expansion `(T,X) = (t/(1−κt), x/(1−κt))` with pull-back multiplier
/// `|1−κt|^{−1/2}·exp[−iκx²/(4(1−κt))]`; valid for `κt ≠ 1`.
pub fn expansion(kappa: f64) -> SpacetimeTransform {
    SpacetimeTransform {
        name: "expansion".into(),
        parameters: vec![("kappa".into(), kappa)],
        coord: Arc::new(move |t, x| {
            let b = 1.0 - kappa * t;
            (t / b, x / b)
        }),
        inverse_coord: Arc::new(move |t, x| {
            let b = 1.0 + kappa * t;
            (t / b, x / b)
        }),
        multiplier: Arc::new(move |t, x| {
            let b = 1.0 - kappa * t;
            Complex64::from_polar(b.abs().powf(-0.5), -kappa * x * x / (4.0 * b))
        }),
        validity: Arc::new(move |t| kappa * t != 1.0),
        validity_desc: format!("{kappa}·t != 1"),
        equation_in: EquationSpec::free_linear(),
        equation_out: EquationSpec::free_linear(),
    }
}

/// Time translation `(T,X) = (t+ε, x)`, multiplier 1.
pub fn time_translation(epsilon: f64) -> SpacetimeTransform {
    SpacetimeTransform {
        name: "time-translation".into(),
        parameters: vec![("epsilon".into(), epsilon)],
        coord: Arc::new(move |t, x| (t + epsilon, x)),
        inverse_coord: Arc::new(move |t, x| (t - epsilon, x)),
        multiplier: Arc::new(|_, _| Complex64::new(1.0, 0.0)),
        validity: Arc::new(|_| true),
        validity_desc: "all t".into(),
        equation_in: EquationSpec::free_linear(),
        equation_out: EquationSpec::free_linear(),
    }
}

/// Time inversion `(T,X) = (−1/t, −x/t)` with multiplier
/// `t^{−1/2}·exp[ix²/(4t)]`, on the branch `t > 0`.
///
/// Carries solutions of the unit-coupling cubic NLS to solutions of the
/// time-decaying equation `F = 1/t`. Equals the composition
/// `time_translation(1) then expansion(1) then time_translation(1)` exactly.
pub fn d_map() -> SpacetimeTransform {
    SpacetimeTransform {
        name: "d-map".into(),
        parameters: vec![],
        coord: Arc::new(|t, x| (-1.0 / t, -x / t)),
        inverse_coord: Arc::new(|t, x| (-1.0 / t, x / t)),
        multiplier: Arc::new(|t, x| Complex64::from_polar(t.powf(-0.5), x * x / (4.0 * t))),
        validity: Arc::new(|t| t > 0.0),
        validity_desc: "t > 0".into(),
        equation_in: EquationSpec::reciprocal_time(),
        equation_out: EquationSpec::constant(1.0),
    }
}

/// Uniformly accelerated frame `(T,X) = (t, x+2αt²)` with multiplier
/// `exp[−i(2αxt + (4/3)α²t³)]`.
///
/// Carries solutions of the coupling-2 cubic NLS to solutions of the
/// linear-potential equation `F = 2`, `V = 2αx`.
pub fn accelerated_frame(alpha: f64) -> SpacetimeTransform {
    SpacetimeTransform {
        name: "accelerated-frame".into(),
        parameters: vec![("alpha".into(), alpha)],
        coord: Arc::new(move |t, x| (t, x + 2.0 * alpha * t * t)),
        inverse_coord: Arc::new(move |t, x| (t, x - 2.0 * alpha * t * t)),
        multiplier: Arc::new(move |t, x| {
            Complex64::from_polar(
                1.0,
                -(2.0 * alpha * x * t + 4.0 / 3.0 * alpha * alpha * t * t * t),
            )
        }),
        validity: Arc::new(|_| true),
        validity_desc: "all t".into(),
        equation_in: EquationSpec::linear_potential(alpha),
        equation_out: EquationSpec::constant(2.0),
    }
}

/// Oscillator lens `(T,X) = (tan(ωt)/ω, x/cos(ωt))` with multiplier
/// `(cos ωt)^{−1/2}·exp[−i(ω/4)x²·tan(ωt)]`, on branches with `cos(ωt) > 0`.
///
/// Carries solutions of the unit-coupling cubic NLS to solutions of the
/// oscillator equation `F = 1/cos(ωt)`, `V = ω²x²/4` (and free linear
/// solutions to solutions of the linear oscillator equation).
pub fn niederer_map(omega: f64) -> Result<SpacetimeTransform> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(CoreError::Parameter(format!(
            "oscillator frequency {omega} must be positive"
        )));
    }
    Ok(SpacetimeTransform {
        name: "niederer".into(),
        parameters: vec![("omega".into(), omega)],
        coord: Arc::new(move |t, x| ((omega * t).tan() / omega, x / (omega * t).cos())),
        inverse_coord: Arc::new(move |t, x| {
            let ot = (omega * t).atan();
            (ot / omega, x * ot.cos())
        }),
        multiplier: Arc::new(move |t, x| {
            let c = (omega * t).cos();
            Complex64::from_polar(c.powf(-0.5), -(omega / 4.0) * x * x * (omega * t).tan())
        }),
        validity: Arc::new(move |t| (omega * t).cos() > 1e-12),
        validity_desc: format!("cos({omega}·t) > 0"),
        equation_in: EquationSpec::oscillator(omega),
        equation_out: EquationSpec::constant(1.0),
    })
}

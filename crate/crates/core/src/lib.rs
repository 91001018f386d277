//! Numerical toolkit for the one-dimensional cubic nonlinear Schrödinger
//! equation with time- and space-dependent coefficients,
//!
//! ```text
//!   i u_t + u_xx + F(t,x) |u|^2 u - V(t,x) u = 0
//! ```
//!
//! on a periodic domain. The crate provides
//!
//! - [`field`] — uniform-grid complex fields, spectral differentiation and
//!   exact trigonometric resampling (the substrate everything else runs on),
//! - [`solutions`] — closed-form solution families (standing, travelling and
//!   time-rescaled solitons, Gaussian free packet) evaluable at any `(t, x)`,
//! - [`transforms`] — the conformal space-time maps (dilatation, expansion,
//!   time translation, time inversion, accelerated frame, oscillator lens)
//!   acting exactly on solution families and approximately on sampled fields,
//! - [`solver`] — a Strang-split pseudospectral time integrator,
//! - [`verify`] — residual evaluation of candidate solutions against any
//!   equation, plus conservation and field-comparison reports,
//! - [`painleve`] — a numerical Painlevé (WTC) integrability test for the
//!   nonlinearity coefficient `F(t)`, including the resonance determinant,
//!   the low-order recurrence, and the compatibility residuals.
//!
//! All types are immutable after construction and freely shareable across
//! threads.

pub mod equation;
pub mod error;
pub mod field;
pub mod io;
pub mod painleve;
pub mod solutions;
pub mod solver;
pub mod transforms;
pub mod verify;

pub use equation::{EquationSpec, TimeDomain};
pub use error::CoreError;
pub use field::{ComplexField, Grid1D, Spectrum};
pub use solutions::{SolitonParams, SolutionFamily};
pub use solver::{SolverConfig, Trajectory};
pub use transforms::SpacetimeTransform;
pub use verify::ResidualReport;

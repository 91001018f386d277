//! Uniform periodic grids, sampled complex fields and their spectra.
//!
//! The grid is periodic: `x_max` itself is not a sample, node `i` sits at
//! `x_min + i * spacing`. Wavenumbers are the signed integers
//! `k ∈ {−n/2, …, n/2−1}`, with angular wavenumber `2πk/L`. Spectral
//! differentiation multiplies mode `k` by `(i·2πk/L)^order`; interpolation is
//! trigonometric, so it is exact for band-limited data.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{CoreError, Result};

/// Uniform periodic spatial grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid1D {
    /// Build a grid on `[x_min, x_max)` with `n_points` samples.
    ///
    /// `n_points` must be a power of two and at least 8; the interval must be
    /// non-degenerate.
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() || x_max <= x_min {
            return Err(CoreError::Config(format!(
                "grid interval [{x_min}, {x_max}] is degenerate"
            )));
        }
        if n_points < 8 || !n_points.is_power_of_two() {
            return Err(CoreError::Config(format!(
                "n_points = {n_points} must be a power of two >= 8"
            )));
        }
        Ok(Grid1D {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Period of the domain.
    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    /// Coordinate of node `i` (periodic convention, `i < n_points`).
    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Signed integer wavenumber of FFT bin `j`: `j` for `j < n/2`, else `j − n`.
    pub fn signed_wavenumber(&self, j: usize) -> i64 {
        let n = self.n_points as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Angular wavenumber `2πk/L` of FFT bin `j`.
    pub fn angular_wavenumber(&self, j: usize) -> f64 {
        TAU * self.signed_wavenumber(j) as f64 / self.length()
    }
}

/// Samples of a complex wave function on a [`Grid1D`] at one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid1D,
    time: f64,
    values: Vec<Complex64>,
}

impl ComplexField {
    /// Wrap sample values; rejects length mismatches and non-finite entries.
    pub fn new(grid: Grid1D, time: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(CoreError::Config(format!(
                "field has {} values but grid has {} points",
                values.len(),
                grid.n_points()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(CoreError::Config(format!(
                "non-finite field value at index {i}"
            )));
        }
        Ok(ComplexField { grid, time, values })
    }

    /// Sample `f(x)` at every grid node.
    pub fn from_fn(grid: Grid1D, time: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = (0..grid.n_points()).map(|i| f(grid.point(i))).collect();
        ComplexField::new(grid, time, values)
    }

    pub fn zeros(grid: Grid1D, time: f64) -> Self {
        ComplexField {
            grid,
            time,
            values: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete mass `spacing · Σ |u_i|²` (periodic rectangle rule).
    pub fn l2_norm_squared(&self) -> f64 {
        self.grid.spacing() * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn to_spectrum(&self) -> Spectrum {
        Spectrum {
            grid: self.grid,
            time: self.time,
            modes: fft_forward(&self.values),
        }
    }

    /// Spectral derivative of order 1 or 2.
    pub fn derivative(&self, order: u32) -> Result<ComplexField> {
        if !(order == 1 || order == 2) {
            return Err(CoreError::Parameter(format!(
                "derivative order {order} not in {{1, 2}}"
            )));
        }
        let mut modes = fft_forward(&self.values);
        for (j, m) in modes.iter_mut().enumerate() {
            let ik = Complex64::new(0.0, self.grid.angular_wavenumber(j));
            *m *= if order == 1 { ik } else { ik * ik };
        }
        let values = fft_inverse(&modes);
        Ok(ComplexField {
            grid: self.grid,
            time: self.time,
            values,
        })
    }

    /// Trigonometric (band-limited) interpolation at arbitrary points.
    ///
    /// Points are reduced modulo the period. Points that coincide bit-exactly
    /// with a grid node return the stored sample.
    pub fn resample(&self, points: &[f64]) -> Vec<Complex64> {
        let n = self.grid.n_points();
        let l = self.grid.length();
        let modes = fft_forward(&self.values);
        let scale = 1.0 / n as f64;
        points
            .iter()
            .map(|&p| {
                // Exact node hit: reproduce the sample bitwise.
                let j = ((p - self.grid.x_min()) / self.grid.spacing()).round();
                if j.is_finite() {
                    let idx = j as i64;
                    let wrapped = idx.rem_euclid(n as i64) as usize;
                    // p may refer to a periodic image of the node.
                    let base = self.grid.x_min() + j * self.grid.spacing();
                    if p == base {
                        return self.values[wrapped];
                    }
                }
                let y = (p - self.grid.x_min()).rem_euclid(l);
                let mut acc = Complex64::new(0.0, 0.0);
                for (jj, m) in modes.iter().enumerate() {
                    let phase = self.grid.angular_wavenumber(jj) * y;
                    acc += m * Complex64::from_polar(1.0, phase);
                }
                acc * scale
            })
            .collect()
    }

    /// Same field stamped with a different time (used by the stepper).
    pub fn with_time(&self, time: f64) -> ComplexField {
        ComplexField {
            grid: self.grid,
            time,
            values: self.values.clone(),
        }
    }

    pub(crate) fn from_parts_unchecked(
        grid: Grid1D,
        time: f64,
        values: Vec<Complex64>,
    ) -> ComplexField {
        ComplexField { grid, time, values }
    }
}

/// Fourier modes of a field, in FFT bin order (`k = 0, 1, …, n/2−1, −n/2, …, −1`).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid1D,
    time: f64,
    modes: Vec<Complex64>,
}

impl Spectrum {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    /// Mode for signed integer wavenumber `k ∈ {−n/2, …, n/2−1}`.
    pub fn mode(&self, k: i64) -> Result<Complex64> {
        let n = self.grid.n_points() as i64;
        if k < -n / 2 || k >= n / 2 {
            return Err(CoreError::Parameter(format!(
                "wavenumber {k} outside [{}, {})",
                -n / 2,
                n / 2
            )));
        }
        let j = k.rem_euclid(n) as usize;
        Ok(self.modes[j])
    }

    pub fn to_field(&self) -> ComplexField {
        ComplexField {
            grid: self.grid,
            time: self.time,
            values: fft_inverse(&self.modes),
        }
    }

    /// Mass computed in spectral space, `(L/n²) Σ |û_k|²` (Parseval).
    pub fn l2_norm_squared(&self) -> f64 {
        let n = self.grid.n_points() as f64;
        self.grid.length() / (n * n) * self.modes.iter().map(|m| m.norm_sqr()).sum::<f64>()
    }
}

pub(crate) fn fft_forward(values: &[Complex64]) -> Vec<Complex64> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(values.len());
    let mut buf = values.to_vec();
    fft.process(&mut buf);
    buf
}

pub(crate) fn fft_inverse(modes: &[Complex64]) -> Vec<Complex64> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(modes.len());
    let mut buf = modes.to_vec();
    fft.process(&mut buf);
    let scale = 1.0 / modes.len() as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Cached forward/inverse plans for repeated transforms of one length.
#[derive(Clone)]
pub(crate) struct FftPair {
    forward: Arc<dyn rustfft::Fft<f64>>,
    inverse: Arc<dyn rustfft::Fft<f64>>,
    n: usize,
}

impl FftPair {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftPair {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            n,
        }
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let scale = 1.0 / self.n as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
}

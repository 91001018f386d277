//! Natural cubic spline, used to turn tabulated coefficient data into a
//! twice-differentiable closure.

use crate::error::{CoreError, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots (natural: zero at the ends).
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<CubicSpline> {
        if xs.len() != ys.len() {
            return Err(CoreError::Config("spline: xs and ys lengths differ".into()));
        }
        let n = xs.len();
        if n < 3 {
            return Err(CoreError::Config("spline needs at least 3 points".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CoreError::Config(
                "spline knots must be strictly increasing".into(),
            ));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(CoreError::Config("spline data must be finite".into()));
        }

        // Tridiagonal solve for interior second derivatives (Thomas algorithm).
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            sub[i] = h0;
            diag[i] = 2.0 * (h0 + h1);
            sup[i] = h1;
            rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
        }
        let mut m = vec![0.0; n];
        // Forward sweep over the interior rows.
        for i in 2..n - 1 {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for i in (1..n - 1).rev() {
            let upper = if i + 1 < n - 1 { m[i + 1] } else { 0.0 };
            m[i] = (rhs[i] - sup[i] * upper) / diag[i];
        }

        Ok(CubicSpline {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            m,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    fn segment(&self, x: f64) -> Option<usize> {
        if x < self.x_min() || x > self.x_max() {
            return None;
        }
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.xs.len() - 2),
        };
        Some(i)
    }

    /// Value at `x`; NaN outside the table range (the caller's finiteness
    /// checks turn that into a domain error).
    pub fn eval(&self, x: f64) -> f64 {
        let Some(i) = self.segment(x) else {
            return f64::NAN;
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv1(&self, x: f64) -> f64 {
        let Some(i) = self.segment(x) else {
            return f64::NAN;
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        (self.ys[i + 1] - self.ys[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    pub fn deriv2(&self, x: f64) -> f64 {
        let Some(i) = self.segment(x) else {
            return f64::NAN;
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.m[i] + b * self.m[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_knots_and_linear_data() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let s = CubicSpline::new(&xs, &ys).unwrap();
        for (&x, &y) in xs.iter().zip(&ys) {
            assert!((s.eval(x) - y).abs() <= 1e-12);
        }
        // Natural spline is exact for linear data, including derivatives.
        assert!((s.deriv1(1.23) - 2.0).abs() <= 1e-10);
        assert!(s.deriv2(1.23).abs() <= 1e-10);
    }

    #[test]
    fn spline_approximates_smooth_function() {
        let xs: Vec<f64> = (0..200).map(|i| 0.05 + i as f64 * 0.01).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 / (1.0 + x)).collect();
        let s = CubicSpline::new(&xs, &ys).unwrap();
        for &x in &[0.3, 0.8, 1.5] {
            assert!((s.eval(x) - 1.0 / (1.0 + x)).abs() <= 1e-8);
            assert!((s.deriv1(x) + 1.0 / (1.0 + x).powi(2)).abs() <= 1e-5);
            assert!((s.deriv2(x) - 2.0 / (1.0 + x).powi(3)).abs() <= 1e-3);
        }
    }

    #[test]
    fn spline_is_nan_outside_range() {
        let s = CubicSpline::new(&[0.0, 1.0, 2.0], &[0.0, 1.0, 4.0]).unwrap();
        assert!(s.eval(-0.1).is_nan());
        assert!(s.eval(2.1).is_nan());
    }

    #[test]
    fn spline_rejects_bad_input() {
        assert!(CubicSpline::new(&[0.0, 1.0], &[0.0, 1.0]).is_err());
        assert!(CubicSpline::new(&[0.0, 1.0, 1.0], &[0.0, 1.0, 2.0]).is_err());
    }
}

use std::f64::consts::PI;

use super::HilbertKernel;
use crate::error::{invalid, Result};

/// Chebyshev series `sum_j a_j T_j(x)` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevSeries {
    coeffs: Vec<f64>,
}

impl ChebyshevSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for &a in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + a;
            b2 = b1;
            b1 = b0;
        }
        let a0 = self.coeffs.first().copied().unwrap_or(0.0);
        x * b1 - b2 + a0
    }

    pub fn derivative(&self) -> Self {
        let m = self.coeffs.len();
        if m <= 1 {
            return Self::new(vec![0.0]);
        }
        let mut d = vec![0.0; m + 1];
        for k in (1..m).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(m - 1);
        Self::new(d)
    }
}

/// Expansion of a function with square-root behaviour at both ends of
/// `[lo, hi]`, such as the chord length of a smooth strictly convex body:
/// `L(v) = w sum_k c_k sqrt(1 - x^2) U_k(x)` with `x = (v - m) / w`, centre
/// `m` and half-width `w`. Sampling at `x_j = cos(j pi / (N + 1))` turns
/// the fit into a discrete sine transform, and the Hilbert transform maps
/// `sqrt(1 - t^2) U_k(t)` to `T_{k+1}(x)` inside the interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SqrtChebyshev {
    centre: f64,
    half_width: f64,
    coeffs: Vec<f64>,
}

impl SqrtChebyshev {
    pub fn fit(lo: f64, hi: f64, nodes: usize, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(invalid("interval", "upper end must exceed lower end"));
        }
        if nodes < 4 {
            return Err(invalid("nodes", "need at least 4 nodes"));
        }
        let centre = 0.5 * (lo + hi);
        let half_width = 0.5 * (hi - lo);
        let theta = PI / (nodes + 1) as f64;
        let y: Vec<f64> = (1..=nodes)
            .map(|j| f(centre + half_width * (j as f64 * theta).cos()) / half_width)
            .collect();
        let scale = 2.0 / (nodes + 1) as f64;
        let coeffs = (0..nodes)
            .map(|k| {
                scale
                    * y.iter()
                        .enumerate()
                        .map(|(j, v)| v * ((k + 1) as f64 * (j + 1) as f64 * theta).sin())
                        .sum::<f64>()
            })
            .collect();
        Ok(Self {
            centre,
            half_width,
            coeffs,
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.centre - self.half_width, self.centre + self.half_width)
    }

    fn local(&self, v: f64) -> f64 {
        (v - self.centre) / self.half_width
    }

    /// The fitted function; zero outside the interval.
    pub fn value(&self, v: f64) -> f64 {
        let x = self.local(v);
        if x.abs() >= 1.0 {
            return 0.0;
        }
        let phi = x.acos();
        self.half_width
            * self
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * ((k + 1) as f64 * phi).sin())
                .sum::<f64>()
    }

    /// `order`-th derivative of the Hilbert transform as a Chebyshev series
    /// in the local variable, already scaled to `v`-derivatives. Valid for
    /// `v` strictly inside the interval.
    pub fn hilbert_derivative_series(&self, order: usize, kernel: HilbertKernel) -> ChebyshevSeries {
        let sign = match kernel {
            HilbertKernel::Backward => 1.0,
            HilbertKernel::Forward => -1.0,
        };
        let mut series = ChebyshevSeries::new(
            std::iter::once(0.0)
                .chain(self.coeffs.iter().copied())
                .collect(),
        );
        for _ in 0..order {
            series = series.derivative();
        }
        let scale = sign * self.half_width.powi(1 - order as i32);
        ChebyshevSeries::new(series.coeffs.iter().map(|a| a * scale).collect())
    }

    pub fn hilbert_derivative(&self, v: f64, order: usize, kernel: HilbertKernel) -> f64 {
        self.hilbert_derivative_series(order, kernel).eval(self.local(v))
    }

    /// Local variable `(v - m) / w` used by the series above.
    pub fn local_coordinate(&self, v: f64) -> f64 {
        self.local(v)
    }
}

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::{check_exclusion, KernelPath, KERNEL_HILBERT};
use crate::error::Result;
use crate::transforms::stencil::grid_derivative;
use crate::transforms::{
    d_s_derivative, radon_indicator_profile, radon_indicator, ChebyshevSeries, GridSpec,
    HilbertKernel, ProfileGrid, SqrtChebyshev,
};
use crate::geometry::Domain;

/// Samples of the slice profile on the uniform route.
pub const PUNCTURED_SAMPLES: usize = 16384;

#[derive(Debug, Clone)]
enum Filtered {
    Zero,
    Series { series: ChebyshevSeries, fit: SqrtChebyshev },
    Grid { profile: ProfileGrid, order: usize },
}

/// Filtered slice profile `s -> d^n/ds^n [H] R chi(w, s)` for one fixed
/// direction `w`.
#[derive(Debug, Clone)]
pub struct DirectionalKernel {
    lo: f64,
    hi: f64,
    data: Filtered,
}

impl DirectionalKernel {
    pub(crate) fn build(
        domain: &Domain,
        n: usize,
        path: KernelPath,
        nodes: usize,
        omega: &[f64],
    ) -> Result<Self> {
        let (lo, hi) = domain.support_interval(omega);
        let data = match path {
            KernelPath::Analytic => Filtered::Zero,
            KernelPath::Chebyshev if n % 2 == 0 => {
                let mut err = None;
                let fit = SqrtChebyshev::fit(lo, hi, nodes, |v| {
                    radon_indicator(domain, omega, v).unwrap_or_else(|e| {
                        err.get_or_insert(e);
                        0.0
                    })
                })?;
                if let Some(e) = err {
                    return Err(e);
                }
                Filtered::Series {
                    series: fit.hilbert_derivative_series(n, KERNEL_HILBERT),
                    fit,
                }
            }
            _ => {
                let width = hi - lo;
                let grid = GridSpec::spanning(lo - 0.5 * width, hi + 0.5 * width, PUNCTURED_SAMPLES)?;
                let profile = radon_indicator_profile(domain, omega, grid)?;
                let profile = if n % 2 == 0 {
                    punctured_hilbert(&profile, KERNEL_HILBERT)
                } else {
                    profile
                };
                Filtered::Grid { profile, order: n }
            }
        };
        Ok(Self { lo, hi, data })
    }

    /// Support interval `[lo, hi]` of the slice profile.
    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Filtered value at `s`, refused within `exclusion * (hi - lo)` of
    /// either support end.
    pub fn filtered(&self, s: f64, exclusion: f64) -> Result<f64> {
        check_exclusion(s, self.lo, self.hi, exclusion)?;
        match &self.data {
            Filtered::Zero => Ok(0.0),
            Filtered::Series { series, fit } => Ok(series.eval(fit.local_coordinate(s))),
            Filtered::Grid { profile, order } => d_s_derivative(profile, *order, s),
        }
    }
}

/// Hilbert transform on the full sampling grid by the punctured trapezoid
/// rule. Writing `g(t) = g(x) + (t - x) phi(t)` with smooth `phi`, the
/// principal value over the grid span `[a, b]` is
/// `int phi + g(x) ln((b - x) / (x - a))`; the trapezoid sum for `int phi`
/// needs `phi(x) = g'(x)` at the puncture. Unlike the alternate-point
/// kernel, every error term is a smooth function of `x`, so the result can
/// be differentiated numerically.
pub(crate) fn punctured_hilbert(profile: &ProfileGrid, kernel: HilbertKernel) -> ProfileGrid {
    let g = profile.samples();
    let n = g.len();
    let h = profile.step();
    let size = (2 * n - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);

    // Trapezoid weights: half at both grid ends.
    let mut data: Vec<Complex64> = g
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            Complex64::new(w * v, 0.0)
        })
        .collect();
    data.resize(size, Complex64::new(0.0, 0.0));
    // sum_j w_j g_j / (j - i) as a correlation: taps at -m carry 1 / m.
    let mut taps = vec![Complex64::new(0.0, 0.0); size];
    for m in 1..n {
        taps[size - m] = Complex64::new(1.0 / m as f64, 0.0);
        taps[m] = Complex64::new(-1.0 / m as f64, 0.0);
    }
    fwd.process(&mut data);
    fwd.process(&mut taps);
    for (d, t) in data.iter_mut().zip(&taps) {
        *d *= t;
    }
    inv.process(&mut data);
    let scale = 1.0 / size as f64;

    // Harmonic prefix sums for sum_{j != i} w_j / (j - i).
    let mut harmonic = vec![0.0; n];
    for k in 1..n {
        harmonic[k] = harmonic[k - 1] + 1.0 / k as f64;
    }
    let slope = grid_derivative(g, h, 1, false);
    let (a, b) = (profile.start(), profile.last());
    let sign = match kernel {
        HilbertKernel::Forward => 1.0,
        HilbertKernel::Backward => -1.0,
    };
    let samples = (0..n)
        .map(|i| {
            let conv = data[i].re * scale;
            let right = n - 1 - i;
            let mut unit = harmonic[right] - harmonic[i];
            if right > 0 {
                unit -= 0.5 / right as f64;
            }
            if i > 0 {
                unit += 0.5 / i as f64;
            }
            let x = profile.coord(i);
            let log = if i == 0 || i == n - 1 {
                0.0
            } else {
                ((b - x) / (x - a)).ln()
            };
            let pv = conv - g[i] * unit + h * slope[i] + g[i] * log;
            sign * pv / PI
        })
        .collect();
    ProfileGrid::from_grid(profile.grid(), samples).expect("same grid")
}

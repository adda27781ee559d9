use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::ProfileGrid;
use crate::error::{Error, Result};
use crate::quadrature::gregory;

/// Relative size of the end samples above which a profile counts as not
/// decayed.
const DECAY_TOLERANCE: f64 = 1e-6;

/// Orientation of the principal-value kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HilbertKernel {
    /// `(H g)(u) = pi^-1 PV int g(s) / (s - u) ds`, Fourier multiplier
    /// `+i sign(xi)`. Under this orientation the transform of
    /// `sqrt(max(0, 1 - s^2))` is `-s` on `|s| < 1`.
    #[default]
    Forward,
    /// `(H g)(u) = pi^-1 PV int g(s) / (u - s) ds`, multiplier `-i sign(xi)`.
    Backward,
}

impl HilbertKernel {
    fn sign(self) -> f64 {
        match self {
            HilbertKernel::Forward => -1.0,
            HilbertKernel::Backward => 1.0,
        }
    }
}

/// Hilbert transform of a decayed profile with the default orientation.
pub fn hilbert_transform(profile: &ProfileGrid) -> Result<ProfileGrid> {
    hilbert_transform_with(profile, HilbertKernel::Forward)
}

/// Hilbert transform on the same grid: aperiodic convolution with the
/// discrete kernel `2 / (pi m)` (odd `m`), whose symbol on the sampling
/// lattice is `-i sign(xi)`, carried out by zero-padded FFT.
pub fn hilbert_transform_with(profile: &ProfileGrid, kernel: HilbertKernel) -> Result<ProfileGrid> {
    check_decay(profile.samples())?;
    ProfileGrid::from_grid(profile.grid(), discrete_hilbert(profile.samples(), kernel))
}

fn check_decay(samples: &[f64]) -> Result<()> {
    let peak = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let end = samples[0].abs().max(samples[samples.len() - 1].abs());
    if end > DECAY_TOLERANCE * peak {
        return Err(Error::NotDecayed {
            end_value: end,
            peak,
        });
    }
    Ok(())
}

/// Discrete Hilbert transform of samples on a uniform grid (the spacing
/// cancels out of the discrete kernel).
pub(crate) fn discrete_hilbert(samples: &[f64], kernel: HilbertKernel) -> Vec<f64> {
    let n = samples.len();
    if n == 0 {
        return Vec::new();
    }
    let size = (2 * n - 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);

    let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    data.resize(size, Complex64::new(0.0, 0.0));
    let mut taps = vec![Complex64::new(0.0, 0.0); size];
    let sign = kernel.sign();
    for m in (1..n).step_by(2) {
        let v = sign * 2.0 / (PI * m as f64);
        taps[m] = Complex64::new(v, 0.0);
        taps[size - m] = Complex64::new(-v, 0.0);
    }
    fwd.process(&mut data);
    fwd.process(&mut taps);
    for (d, t) in data.iter_mut().zip(&taps) {
        *d *= t;
    }
    inv.process(&mut data);
    let scale = 1.0 / size as f64;
    data[..n].iter().map(|c| c.re * scale).collect()
}

/// Residual `max |H(s g)(u) - u H(g)(u) - pi^-1 int g|` of the
/// multiplication identity for the default orientation.
pub fn hilbert_identity_check(profile: &ProfileGrid) -> Result<f64> {
    check_decay(profile.samples())?;
    let g = profile.samples();
    let sg: Vec<f64> = g
        .iter()
        .enumerate()
        .map(|(j, v)| profile.coord(j) * v)
        .collect();
    let hg = discrete_hilbert(g, HilbertKernel::Forward);
    let hsg = discrete_hilbert(&sg, HilbertKernel::Forward);
    let mass = gregory(g, profile.step()) / PI;
    Ok(hsg
        .iter()
        .zip(&hg)
        .enumerate()
        .map(|(j, (a, b))| (a - profile.coord(j) * b - mass).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::super::GridSpec;
    use super::*;

    fn semicircle(len: usize) -> ProfileGrid {
        let grid = GridSpec::spanning(-4.0, 4.0, len).unwrap();
        ProfileGrid::from_fn(grid, |s| (1.0 - s * s).max(0.0).sqrt())
    }

    #[test]
    fn semicircle_goldens() {
        let h = hilbert_transform(&semicircle(8192)).unwrap();
        let a = h.interpolate(0.5).unwrap();
        let b = h.interpolate(2.0).unwrap();
        assert!((a + 0.5).abs() < 1e-3, "{a}");
        assert!((b - (-2.0 + 3f64.sqrt())).abs() < 1e-3, "{b}");
    }

    #[test]
    fn odd_profile_at_origin() {
        // g(s) = s exp(-s^2): pi^-1 PV int g(s)/s ds = 1/sqrt(pi).
        let grid = GridSpec::spanning(-10.0, 10.0, 2001).unwrap();
        let p = ProfileGrid::from_fn(grid, |s| s * (-s * s).exp());
        let h = hilbert_transform(&p).unwrap();
        let v = h.samples()[1000];
        assert!((v - 1.0 / PI.sqrt()).abs() < 1e-10, "{v}");
    }

    #[test]
    fn orientations_differ_by_sign() {
        let p = semicircle(256);
        let f = hilbert_transform_with(&p, HilbertKernel::Forward).unwrap();
        let b = hilbert_transform_with(&p, HilbertKernel::Backward).unwrap();
        for (x, y) in f.samples().iter().zip(b.samples()) {
            assert!((x + y).abs() < 1e-14);
        }
    }

    #[test]
    fn anti_self_adjoint() {
        let grid = GridSpec::spanning(-8.0, 8.0, 1024).unwrap();
        let g = ProfileGrid::from_fn(grid, |s| (-(s - 0.3) * (s - 0.3)).exp());
        let k = ProfileGrid::from_fn(grid, |s| s * (-2.0 * s * s).exp());
        let hg = hilbert_transform(&g).unwrap();
        let hk = hilbert_transform(&k).unwrap();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let lhs = dot(hg.samples(), k.samples());
        let rhs = -dot(g.samples(), hk.samples());
        assert!((lhs - rhs).abs() < 1e-8);
    }

    #[test]
    fn identity_residuals() {
        assert!(hilbert_identity_check(&semicircle(8192)).unwrap() < 1e-3);
        let grid = GridSpec::spanning(-4.0, 4.0, 64).unwrap();
        let zero = ProfileGrid::from_fn(grid, |_| 0.0);
        assert_eq!(hilbert_identity_check(&zero).unwrap(), 0.0);
        let bump = |len| {
            let grid = GridSpec::spanning(-3.0, 3.0, len).unwrap();
            ProfileGrid::from_fn(grid, |s| (1.0 - 16.0 * (s - 0.123) * (s - 0.123)).max(0.0).sqrt())
        };
        let coarse = hilbert_identity_check(&bump(128)).unwrap();
        let fine = hilbert_identity_check(&bump(1024)).unwrap();
        assert!(fine < coarse, "{coarse} {fine}");
    }

    #[test]
    fn rejects_undecayed_profiles() {
        let grid = GridSpec::spanning(-1.0, 1.0, 64).unwrap();
        let p = ProfileGrid::from_fn(grid, |s| 1.0 + s);
        assert!(matches!(hilbert_transform(&p), Err(Error::NotDecayed { .. })));
    }
}

use std::f64::consts::PI;

use super::hilbert::{discrete_hilbert, HilbertKernel};
use super::stencil::fornberg;
use super::{cubic_interpolate, GridSpec, ProfileGrid};
use crate::error::{invalid, Error, Result};
use crate::quadrature::gregory;

/// Nodes used to interpolate the numerator and its slope at `r = d`.
const LOCAL_NODES: usize = 8;

/// `PV int_a^R g(r) / (r^2 - d^2) dr` over the profile's grid `[a, R]` by
/// singularity subtraction: the regular remainder `(g(r) - g(d)) / (r^2 -
/// d^2)` is integrated numerically and `g(d)` times the closed-form
/// principal value of `1 / (r^2 - d^2)` is added back.
pub fn pv_integral(numerator: &ProfileGrid, d: f64) -> Result<f64> {
    let (a, r_max, h) = (numerator.start(), numerator.last(), numerator.step());
    if a < 0.0 {
        return Err(invalid("numerator", "radial grid must start at r >= 0"));
    }
    if !(d - a >= 3.0 * h && r_max - d >= 3.0 * h) || d <= 0.0 {
        return Err(Error::InsufficientGrid(format!(
            "d = {d} must stay three grid steps inside [{a}, {r_max}]"
        )));
    }
    let n = numerator.len();
    let g = numerator.samples();
    let first = (((d - a) / h).round() as usize)
        .saturating_sub(LOCAL_NODES / 2)
        .min(n - LOCAL_NODES);
    let nodes: Vec<f64> = (first..first + LOCAL_NODES).map(|j| numerator.coord(j)).collect();
    let w = fornberg(d, &nodes, 1);
    let g_d: f64 = (0..LOCAL_NODES).map(|k| w[0][k] * g[first + k]).sum();
    let slope: f64 = (0..LOCAL_NODES).map(|k| w[1][k] * g[first + k]).sum();

    let remainder: Vec<f64> = g
        .iter()
        .enumerate()
        .map(|(j, gj)| {
            let r = numerator.coord(j);
            if (r - d).abs() < 1e-9 * h {
                slope / (2.0 * d)
            } else {
                (gj - g_d) / ((r - d) * (r + d))
            }
        })
        .collect();
    let log_ratio = |r: f64| ((r - d) / (r + d)).abs().ln();
    let singular = g_d / (2.0 * d) * (log_ratio(r_max) - log_ratio(a));
    Ok(gregory(&remainder, h) + singular)
}

/// Principal-value integrals `PV int_0^inf g(r) / (r^2 - d^2) dr` of one
/// radial profile for many `d`. With `g_e` the even extension of `g`,
/// the integral equals `pi / (2d) (H g_e)(d)` for the forward Hilbert
/// orientation; the Hilbert transform is tabulated once on the grid and
/// interpolated afterwards.
#[derive(Debug, Clone)]
pub struct RadialPv {
    grid: GridSpec,
    hilbert: Vec<f64>,
}

impl RadialPv {
    /// `numerator` must start at `r = 0` and vanish towards its far end.
    pub fn new(numerator: &ProfileGrid) -> Result<Self> {
        let grid = numerator.grid();
        if !grid.starts_at_zero() {
            return Err(invalid("numerator", "radial grid must start at r = 0"));
        }
        let g = numerator.samples();
        let n = g.len();
        let extended: Vec<f64> = (0..2 * n - 1)
            .map(|k| g[(k as isize - (n as isize - 1)).unsigned_abs()])
            .collect();
        let h = discrete_hilbert(&extended, HilbertKernel::Forward);
        Ok(Self {
            grid,
            hilbert: h[n - 1..].to_vec(),
        })
    }

    /// The principal value at `d > 0`; `None` beyond the grid.
    pub fn eval(&self, d: f64) -> Option<f64> {
        if d <= 0.0 {
            return None;
        }
        cubic_interpolate(&self.hilbert, self.grid.start, self.grid.step, d)
            .map(|h| PI / (2.0 * d) * h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(r_max: f64, len: usize, f: impl Fn(f64) -> f64) -> ProfileGrid {
        ProfileGrid::from_fn(GridSpec::spanning(0.0, r_max, len).unwrap(), f)
    }

    #[test]
    fn constant_numerator_golden() {
        let p = profile(2.0, 2001, |_| 1.0);
        let v = pv_integral(&p, 1.0).unwrap();
        assert!((v - 0.5 * (1.0f64 / 3.0).ln()).abs() < 1e-8, "{v}");
    }

    #[test]
    fn cancelling_numerator_integrates_to_length() {
        let d = 0.7;
        let p = profile(2.5, 1001, |r| r * r - d * d);
        assert!((pv_integral(&p, d).unwrap() - 2.5).abs() < 1e-10);
        let z = profile(2.5, 1001, |_| 0.0);
        assert_eq!(pv_integral(&z, d).unwrap(), 0.0);
    }

    #[test]
    fn tail_from_doubling_the_range() {
        let d = 0.6;
        let (r1, r2) = (2.0, 4.0);
        let a = pv_integral(&profile(r1, 2001, |_| 1.0), d).unwrap();
        let b = pv_integral(&profile(r2, 4001, |_| 1.0), d).unwrap();
        let tail = ((r2 - d) * (r1 + d) / ((r2 + d) * (r1 - d))).ln() / (2.0 * d);
        assert!((b - a - tail).abs() < 1e-8);
    }

    #[test]
    fn rejects_singularity_near_ends() {
        let p = profile(2.0, 201, |_| 1.0);
        assert!(pv_integral(&p, 0.02).is_err());
        assert!(pv_integral(&p, 1.99).is_err());
    }

    #[test]
    fn fast_route_matches_subtraction() {
        let bump = |r: f64| (1.0 - (r - 1.0).powi(2) / 0.25).max(0.0).powi(6);
        let p = profile(3.0, 3001, bump);
        let fast = RadialPv::new(&p).unwrap();
        for d in [0.3, 0.8, 1.0, 1.23, 2.0] {
            let slow = pv_integral(&p, d).unwrap();
            let quick = fast.eval(d).unwrap();
            assert!((slow - quick).abs() < 1e-6 * (1.0 + slow.abs()), "{d}: {slow} {quick}");
        }
    }
}

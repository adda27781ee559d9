use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{Bump, Phantom};
use crate::error::{invalid, Result};
use crate::geometry::boundary::unit_sphere_rule;
use crate::geometry::{check_dim, distance, unit_sphere_area};
use crate::quadrature::gauss_legendre;

const ANGULAR_NODES: usize = 64;

fn angular_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ANGULAR_NODES))
}

/// Average of the phantom over the sphere of radius `r` about `x`,
/// normalised by the area of the unit sphere.
///
/// Each bump is radial about its own centre `c`, so with `d = |x - c|` its
/// mean reduces to
/// `w_{n-2} / w_{n-1} int_0^pi F(d^2 + r^2 + 2 d r cos t) sin^{n-2} t dt`,
/// restricted to the arc where the sphere meets the support and integrated
/// with Gauss-Legendre.
pub fn spherical_mean(phantom: &Phantom, x: &[f64], r: f64) -> Result<f64> {
    check_dim(phantom.dim, x.len())?;
    if !(r >= 0.0) {
        return Err(invalid("r", "radius must be non-negative"));
    }
    if r == 0.0 {
        return Ok(phantom.eval(x));
    }
    let n = phantom.dim;
    let ratio = unit_sphere_area(n - 1)? / unit_sphere_area(n)?;
    Ok(phantom
        .bumps
        .iter()
        .map(|b| bump_mean(b, n, distance(x, &b.center), r, ratio))
        .sum())
}

fn bump_mean(b: &Bump, n: usize, d: f64, r: f64, ratio: f64) -> f64 {
    let rho2 = b.radius * b.radius;
    if d * r == 0.0 {
        return b.profile_sq(d * d + r * r);
    }
    if (d - r).abs() >= b.radius {
        return 0.0;
    }
    // The sphere meets the support where cos t < mu.
    let mu = (rho2 - d * d - r * r) / (2.0 * d * r);
    let t0 = if mu >= 1.0 { 0.0 } else { mu.acos() };
    let (nodes, weights) = angular_rule();
    let half = 0.5 * (PI - t0);
    let mid = 0.5 * (PI + t0);
    let sum: f64 = nodes
        .iter()
        .zip(weights)
        .map(|(u, w)| {
            let t = mid + half * u;
            let (s, c) = t.sin_cos();
            w * b.profile_sq(d * d + r * r + 2.0 * d * r * c) * s.powi(n as i32 - 2)
        })
        .sum();
    ratio * half * sum
}

/// Reference spherical mean by direct quadrature over the sphere: the
/// trapezoid rule with `resolution` nodes in the plane, and the product
/// Gauss-Legendre x trapezoid rule in higher dimension.
pub fn spherical_mean_direct(phantom: &Phantom, x: &[f64], r: f64, resolution: usize) -> Result<f64> {
    check_dim(phantom.dim, x.len())?;
    if !(r >= 0.0) {
        return Err(invalid("r", "radius must be non-negative"));
    }
    let n = phantom.dim;
    let rule = unit_sphere_rule(n, resolution)?;
    let total: f64 = rule
        .iter()
        .map(|(sigma, w)| {
            let y: Vec<f64> = x.iter().zip(sigma).map(|(a, s)| a + r * s).collect();
            w * phantom.eval(&y)
        })
        .sum();
    Ok(total / unit_sphere_area(n)?)
}

use super::{GridSpec, ProfileGrid};
use crate::error::{Error, Result};
use crate::geometry::boundary::unit_sphere_rule;
use crate::geometry::{check_dim, norm_sq, unit_ball_volume, Domain};

fn check_direction(domain: &Domain, omega: &[f64]) -> Result<()> {
    check_dim(domain.dim(), omega.len())?;
    let norm = norm_sq(omega).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitDirection { norm });
    }
    Ok(())
}

/// `(n-1)`-volume of the slice `{x in domain : omega . x = s}`.
///
/// Ellipsoids use the closed form `det A / |A w| * V_{n-1} (1 - t^2)^((n-1)/2)`
/// with `t = s / |A w|`; planar domains use the chord between the two
/// boundary crossings.
pub fn radon_indicator(domain: &Domain, omega: &[f64], s: f64) -> Result<f64> {
    check_direction(domain, omega)?;
    Ok(match domain {
        Domain::Ellipsoid(e) => {
            let aw = e.support(omega);
            let t = s / aw;
            if t.abs() >= 1.0 {
                0.0
            } else {
                let n = e.dim();
                e.det() / aw * unit_ball_volume(n - 1) * (1.0 - t * t).powf(0.5 * (n as f64 - 1.0))
            }
        }
        Domain::Smooth2D(d) => {
            let sup = d.support(omega);
            d.chord_length(omega, s, &sup)
        }
    })
}

/// Slice volumes on every point of `grid`.
pub fn radon_indicator_profile(domain: &Domain, omega: &[f64], grid: GridSpec) -> Result<ProfileGrid> {
    check_direction(domain, omega)?;
    let samples = match domain {
        Domain::Smooth2D(d) => {
            let sup = d.support(omega);
            grid.coords().map(|s| d.chord_length(omega, s, &sup)).collect()
        }
        Domain::Ellipsoid(_) => grid
            .coords()
            .map(|s| radon_indicator(domain, omega, s))
            .collect::<Result<Vec<_>>>()?,
    };
    ProfileGrid::from_grid(grid, samples)
}

/// Independent slice-volume oracle that uses only membership tests: the
/// slice is star-shaped about an interior point `c`, its radial function is
/// found by bisection along rays, and the volume is
/// `(n-1)^-1 int_{S^{n-2}} rho^(n-1)`, integrated with the product sphere
/// rule of the given resolution.
pub fn radon_indicator_numeric(domain: &Domain, omega: &[f64], s: f64, resolution: usize) -> Result<f64> {
    check_direction(domain, omega)?;
    let n = domain.dim();
    let basis = orthonormal_complement(omega);
    let reach = domain.diameter() + s.abs();
    let inside = |x: &[f64]| domain.contains(x).unwrap_or(false);
    let Some(centre) = slice_point(domain, omega, s, &basis, reach) else {
        return Ok(0.0);
    };
    let point_along = |dir: &[f64], rho: f64| -> Vec<f64> {
        let mut x = centre.clone();
        for (b, d) in basis.iter().zip(dir) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += rho * d * bi;
            }
        }
        x
    };
    let radial = |dir: &[f64]| -> f64 {
        let (mut lo, mut hi) = (0.0, reach);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if inside(&point_along(dir, mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let m = n - 1;
    let rule = unit_sphere_rule(m, resolution)?;
    let total: f64 = rule.iter().map(|(dir, w)| w * radial(dir).powi(m as i32)).sum();
    Ok(total / m as f64)
}

/// Some point of the slice, or `None` when the slice is empty.
fn slice_point(domain: &Domain, omega: &[f64], s: f64, basis: &[Vec<f64>], reach: f64) -> Option<Vec<f64>> {
    let on_plane = |coords: &[f64]| -> Vec<f64> {
        let mut x: Vec<f64> = omega.iter().map(|w| s * w).collect();
        for (b, c) in basis.iter().zip(coords) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += c * bi;
            }
        }
        x
    };
    let inside = |x: &[f64]| domain.contains(x).unwrap_or(false);
    match domain {
        Domain::Ellipsoid(e) => {
            // Centre of the elliptical slice: s A^2 w / |A w|^2.
            let aw2: f64 = omega
                .iter()
                .zip(e.semi_axes())
                .map(|(w, a)| (a * w).powi(2))
                .sum();
            let c: Vec<f64> = omega
                .iter()
                .zip(e.semi_axes())
                .map(|(w, a)| s * a * a * w / aw2)
                .collect();
            inside(&c).then_some(c)
        }
        Domain::Smooth2D(_) => (0..=4096)
            .map(|k| on_plane(&[-reach + 2.0 * reach * k as f64 / 4096.0]))
            .find(|x| inside(x)),
    }
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `omega`.
fn orthonormal_complement(omega: &[f64]) -> Vec<Vec<f64>> {
    let n = omega.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    let mut candidates: Vec<usize> = (0..n).collect();
    // Start from the axes least aligned with omega for conditioning.
    candidates.sort_by(|&i, &j| omega[i].abs().total_cmp(&omega[j].abs()));
    for &axis in &candidates {
        if basis.len() == n - 1 {
            break;
        }
        let mut v = vec![0.0; n];
        v[axis] = 1.0;
        for _ in 0..2 {
            let p: f64 = v.iter().zip(omega).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(omega).for_each(|(a, b)| *a -= p * b);
            for b in &basis {
                let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(a, c)| *a -= p * c);
            }
        }
        let norm = norm_sq(&v).sqrt();
        if norm > 1e-8 {
            basis.push(v.iter().map(|x| x / norm).collect());
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainSpec, Ellipsoid};
    use std::f64::consts::PI;

    fn ball(n: usize) -> Domain {
        Domain::Ellipsoid(Ellipsoid::ball(n, 1.0).unwrap())
    }

    #[test]
    fn closed_form_examples() {
        assert!((radon_indicator(&ball(2), &[0.6, 0.8], 0.0).unwrap() - 2.0).abs() < 1e-14);
        let v = radon_indicator(&ball(3), &[0.0, 0.0, 1.0], 0.6).unwrap();
        assert!((v - PI * 0.64).abs() < 1e-12);
        let e = Domain::Ellipsoid(Ellipsoid::new(vec![2.0, 1.0]).unwrap());
        let v = radon_indicator(&e, &[1.0, 0.0], 1.0).unwrap();
        assert!((v - 3f64.sqrt()).abs() < 1e-12);
        let grid = GridSpec::spanning(-1.5, 1.5, 257).unwrap();
        let p = radon_indicator_profile(&e, &[0.0, 1.0], grid).unwrap();
        for (j, v) in p.samples().iter().enumerate() {
            let s: f64 = p.coord(j);
            let exact = if s.abs() < 1.0 { 4.0 * (1.0 - s * s).sqrt() } else { 0.0 };
            assert!((v - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_unit_direction() {
        assert!(matches!(
            radon_indicator(&ball(2), &[1.0, 1e-5], 0.0),
            Err(Error::NonUnitDirection { .. })
        ));
    }

    #[test]
    fn disk_profile_is_symmetric_with_peak_two() {
        let grid = GridSpec::spanning(-1.5, 1.5, 257).unwrap();
        let p = radon_indicator_profile(&ball(2), &[1.0, 0.0], grid).unwrap();
        let s = p.samples();
        for j in 0..s.len() {
            assert!((s[j] - s[s.len() - 1 - j]).abs() < 1e-12);
        }
        assert!((s[128] - 2.0).abs() < 1e-14);
        assert_eq!(s[0], 0.0);
    }

    #[test]
    fn oracle_agrees_with_closed_form() {
        let e3 = Domain::Ellipsoid(Ellipsoid::new(vec![1.5, 1.0, 0.7]).unwrap());
        let w = [0.48, 0.6, 0.64];
        let h = 1.5f64.powi(2) * 0.48f64.powi(2) + 0.36 + 0.49 * 0.64f64.powi(2);
        for s in [-0.9 * h.sqrt(), 0.0, 0.5] {
            let exact = radon_indicator(&e3, &w, s).unwrap();
            let approx = radon_indicator_numeric(&e3, &w, s, 48).unwrap();
            assert!((approx / exact - 1.0).abs() < 1e-6, "{s}: {exact} {approx}");
        }
        for n in 2..=4 {
            let v = radon_indicator_numeric(&ball(n), &{
                let mut w = vec![0.0; n];
                w[0] = 1.0;
                w
            }, 0.0, 48)
            .unwrap();
            assert!((v - unit_ball_volume(n - 1)).abs() < 1e-6, "{n}: {v}");
        }
    }

    #[test]
    fn planar_chord_matches_oracle() {
        let d = DomainSpec::Superellipse {
            a: 1.0,
            b: 0.8,
            p: 3.0,
            smoothing: 0.1,
        }
        .build()
        .unwrap();
        let w = [0.6, -0.8];
        for s in [-0.5, 0.0, 0.31] {
            let a = radon_indicator(&d, &w, s).unwrap();
            let b = radon_indicator_numeric(&d, &w, s, 8).unwrap();
            assert!((a - b).abs() < 1e-10, "{s}: {a} {b}");
        }
    }
}

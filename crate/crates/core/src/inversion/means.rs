use std::f64::consts::PI;

use super::{
    backproject, backproject_points, check_grid, check_points, filter_data, ReconstructionGrid, Variant,
    POINT_STENCIL_STEP,
};
use crate::error::{invalid, Error, Result};
use crate::forward::SphericalMeanData;
use crate::geometry::{unit_sphere_area, Domain};
use crate::quadrature::gauss_legendre_on;
use crate::transforms::{cubic_interpolate, derivative, ProfileGrid, RadialPv, Symmetry};
use crate::forward::weighted_stack;

/// Polar-angle nodes of the radial reduction on balls.
const BALL_ANGLE_NODES: usize = 256;

/// `(-1)^((n-2)/2) w_{n-1} / (2 pi^n)` for even `n`,
/// `(-1)^((n-3)/2) w_{n-1} / (4 pi^(n-1))` for odd `n`.
fn means_constant(n: usize) -> Result<f64> {
    let area = unit_sphere_area(n)?;
    Ok(if n % 2 == 0 {
        let sign = if ((n - 2) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        sign * area / (2.0 * PI.powi(n as i32))
    } else {
        let sign = if ((n - 3) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        sign * area / (4.0 * PI.powi(n as i32 - 1))
    })
}

/// Per-row radial factor of the means back-projection: the principal
/// value `PV int_0^inf g(r) / (r^2 - d^2) dr` of the filtered row for even
/// `n`; the filtered row at `r = d` for odd `n` (divided by `d` in variant
/// (b)).
enum RadialFactor {
    Pv(RadialPv),
    Sampled { row: ProfileGrid, divide: bool },
}

impl RadialFactor {
    fn new(row: ProfileGrid, n: usize, variant: Variant) -> Result<Self> {
        Ok(if n % 2 == 0 {
            RadialFactor::Pv(RadialPv::new(&row)?)
        } else {
            RadialFactor::Sampled {
                row,
                divide: variant == Variant::B,
            }
        })
    }

    fn eval(&self, d: f64) -> Result<f64> {
        let value = match self {
            RadialFactor::Pv(pv) => pv.eval(d),
            RadialFactor::Sampled { row, divide } => {
                cubic_interpolate(row.samples(), row.start(), row.step(), d)
                    .map(|v| if *divide { v / d } else { v })
            }
        };
        value.ok_or_else(|| {
            Error::InsufficientGrid(format!("radius {d} lies outside the radial grid"))
        })
    }
}

fn check_same_domain(data: &SphericalMeanData, domain: &Domain) -> Result<()> {
    if data.meta.domain != domain.spec() {
        return Err(Error::Mismatch(
            "data were generated on a different domain".into(),
        ));
    }
    Ok(())
}

/// Boundary back-projection of filtered spherical means. The result equals
/// `f - K f` on the masked lattice, which is `f` itself on ellipsoids.
pub fn reconstruct_means(
    data: &SphericalMeanData,
    domain: &Domain,
    grid: &ReconstructionGrid,
    n: usize,
    variant: Variant,
) -> Result<ReconstructionGrid> {
    check_same_domain(data, domain)?;
    check_grid(domain, grid)?;
    let filtered = filter_data(data, n, variant)?;
    let factors = (0..filtered.values.len())
        .map(|i| RadialFactor::new(filtered.row(i), n, variant))
        .collect::<Result<Vec<_>>>()?;
    backproject(grid, domain, &data.boundary, means_constant(n)?, variant, |i, d| {
        factors[i].eval(d)
    })
}

/// [`reconstruct_means`] at scattered interior points. Variant (a) takes
/// its divergence stencils with step [`POINT_STENCIL_STEP`] times the
/// domain diameter.
pub fn reconstruct_means_at(
    data: &SphericalMeanData,
    domain: &Domain,
    points: &[Vec<f64>],
    n: usize,
    variant: Variant,
) -> Result<Vec<f64>> {
    check_same_domain(data, domain)?;
    check_points(domain, n, points)?;
    let filtered = filter_data(data, n, variant)?;
    let factors = (0..filtered.values.len())
        .map(|i| RadialFactor::new(filtered.row(i), n, variant))
        .collect::<Result<Vec<_>>>()?;
    let steps = vec![POINT_STENCIL_STEP * domain.diameter(); n];
    backproject_points(points, &steps, domain, &data.boundary, means_constant(n)?, variant, |i, d| {
        factors[i].eval(d)
    })
}

/// Exact inversion on ellipsoids: the variant (a) computation of
/// [`reconstruct_means`], refused on any other domain.
pub fn reconstruct_elliptical(
    data: &SphericalMeanData,
    domain: &Domain,
    grid: &ReconstructionGrid,
    n: usize,
) -> Result<ReconstructionGrid> {
    if !domain.is_ellipsoid() {
        return Err(Error::Unsupported(
            "exact elliptical inversion needs an ellipsoid".into(),
        ));
    }
    reconstruct_means(data, domain, grid, n, Variant::A)
}

/// Variant (b) inversion on the ball `|x| < radius` for data that are the
/// same on every boundary point (a phantom radial about the centre), at
/// points `(rho, 0, ..., 0)`. The boundary integral reduces to
/// `radius^(n-1) w_{n-2} int_0^pi (rho cos t - radius) K(d) sin^(n-2) t dt`
/// with `d^2 = radius^2 + rho^2 - 2 radius rho cos t`.
pub fn reconstruct_radial_ball(
    row: &ProfileGrid,
    radius: f64,
    n: usize,
    rho: &[f64],
) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(invalid("n", "dimension must be at least 2"));
    }
    if !row.grid().starts_at_zero() {
        return Err(invalid("row", "radius grid must start at r = 0"));
    }
    if rho.iter().any(|r| !(r.abs() < radius)) {
        return Err(invalid("rho", "evaluation points must lie inside the ball"));
    }
    let symmetry = if n % 2 == 0 {
        Symmetry::EvenAtOrigin
    } else {
        Symmetry::None
    };
    let stack = weighted_stack(row, n, n - 2)?;
    let slope = derivative(&stack, 1, symmetry)?;
    let factor = RadialFactor::new(slope, n, Variant::B)?;
    let c = means_constant(n)? * radius.powi(n as i32 - 1) * unit_sphere_area(n - 1)?;
    let (ts, ws) = gauss_legendre_on(BALL_ANGLE_NODES, 0.0, PI);
    rho.iter()
        .map(|&p| {
            let mut sum = 0.0;
            for (t, w) in ts.iter().zip(&ws) {
                let (s, co) = t.sin_cos();
                let d = (radius * radius + p * p - 2.0 * radius * p * co).max(0.0).sqrt();
                sum += w * (p * co - radius) * factor.eval(d)? * s.powi(n as i32 - 2);
            }
            Ok(c * sum)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{forward_data, spherical_mean, Bump, Phantom};
    use crate::geometry::DomainSpec;
    use crate::inversion::reconstruction_error;
    use crate::transforms::GridSpec;

    fn ellipse() -> Domain {
        DomainSpec::Ellipsoid {
            semi_axes: vec![1.0, 0.7],
        }
        .build()
        .unwrap()
    }

    fn phantom() -> Phantom {
        Phantom::new(
            2,
            vec![Bump {
                center: vec![0.15, -0.05],
                radius: 0.4,
                smoothness: 6,
                amplitude: 1.0,
            }],
        )
        .unwrap()
    }

    #[test]
    fn ellipse_reconstruction_at_moderate_resolution() {
        let d = ellipse();
        let p = phantom();
        let data = forward_data(&p, &d, 256, 1024).unwrap();
        let grid = ReconstructionGrid::covering(&d, 32).unwrap();
        let truth = grid.sampled(|x| p.eval(x));
        for variant in [Variant::A, Variant::B] {
            let recon = reconstruct_means(&data, &d, &grid, 2, variant).unwrap();
            let err = reconstruction_error(&truth, &recon).unwrap();
            assert!(err.relative_l2 < 0.03, "{variant:?}: {err:?}");
        }
    }

    #[test]
    fn zero_data_give_zero_field() {
        let d = ellipse();
        let data = forward_data(&Phantom::zero(2), &d, 32, 128).unwrap();
        let grid = ReconstructionGrid::covering(&d, 12).unwrap();
        let recon = reconstruct_means(&data, &d, &grid, 2, Variant::B).unwrap();
        assert!(recon.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn elliptical_entry_point_is_variant_a() {
        let d = ellipse();
        let data = forward_data(&phantom(), &d, 64, 256).unwrap();
        let grid = ReconstructionGrid::covering(&d, 12).unwrap();
        let a = reconstruct_means(&data, &d, &grid, 2, Variant::A).unwrap();
        let e = reconstruct_elliptical(&data, &d, &grid, 2).unwrap();
        assert_eq!(a, e);
        let pts: Vec<Vec<f64>> = a.active().iter().take(5).map(|&i| a.point(i)).collect();
        let at = reconstruct_means_at(&data, &d, &pts, 2, Variant::B).unwrap();
        let b = reconstruct_means(&data, &d, &grid, 2, Variant::B).unwrap();
        for (v, &i) in at.iter().zip(a.active().iter()) {
            assert_eq!(*v, b.values[i]);
        }
        let other = DomainSpec::Superellipse {
            a: 1.0,
            b: 0.8,
            p: 3.0,
            smoothing: 0.1,
        }
        .build()
        .unwrap();
        assert!(reconstruct_elliptical(&data, &other, &grid, 2).is_err());
        assert!(matches!(
            reconstruct_means(&data, &other, &grid, 2, Variant::B),
            Err(Error::Mismatch(_))
        ));
    }

    #[test]
    fn radial_reduction_in_four_and_five_dimensions() {
        for n in [3usize, 4, 5] {
            let mut far = vec![0.0; n];
            far[0] = 1.0;
            let p = Phantom::new(
                n,
                vec![Bump {
                    center: vec![0.0; n],
                    radius: 0.6,
                    smoothness: n as u32 + 4,
                    amplitude: 1.0,
                }],
            )
            .unwrap();
            let grid = GridSpec::spanning(0.0, 2.1, 2048).unwrap();
            let row = ProfileGrid::from_fn(grid, |r| spherical_mean(&p, &far, r).unwrap());
            let rho: Vec<f64> = (0..20).map(|k| 0.03 * k as f64).collect();
            let values = reconstruct_radial_ball(&row, 1.0, n, &rho).unwrap();
            for (r, v) in rho.iter().zip(&values) {
                let mut x = vec![0.0; n];
                x[0] = *r;
                assert!((v - p.eval(&x)).abs() < 0.03, "n = {n}, rho = {r}: {v}");
            }
        }
    }
}

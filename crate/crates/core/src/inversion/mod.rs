//! Reconstruction from spherical means and from wave data by boundary
//! back-projection.

mod filter;
mod grid;
mod means;
mod wave;

pub use filter::{filter_data, FilteredData, Variant};
pub use grid::{reconstruction_error, ErrorReport, PgmScaling, ReconstructionGrid};
pub use means::{reconstruct_elliptical, reconstruct_means, reconstruct_means_at, reconstruct_radial_ball};
pub use wave::{universal_backprojection_wave, WaveReconstruction};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{distance, BoundaryQuadrature, Domain};
use crate::transforms::stencil::fornberg;

/// Checks that every masked grid point lies inside the domain.
fn check_grid(domain: &Domain, grid: &ReconstructionGrid) -> Result<()> {
    let points: Vec<Vec<f64>> = grid.active().iter().map(|&i| grid.point(i)).collect();
    check_points(domain, grid.dim(), &points)
}

fn check_points(domain: &Domain, dim: usize, points: &[Vec<f64>]) -> Result<()> {
    if dim != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: dim,
        });
    }
    for x in points {
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        if !domain.contains(x)? {
            return Err(Error::OutsideDomain(x.clone()));
        }
    }
    Ok(())
}

/// Step of the divergence stencils relative to the lattice spacing.
pub const DIVERGENCE_STEP_RATIO: f64 = 0.25;
/// Divergence stencil step for scattered points, relative to the domain
/// diameter.
pub const POINT_STENCIL_STEP: f64 = 4e-3;

/// Back-projection onto the masked lattice points; see [`backproject_points`].
fn backproject<F>(
    grid: &ReconstructionGrid,
    domain: &Domain,
    boundary: &BoundaryQuadrature,
    constant: f64,
    variant: Variant,
    radial: F,
) -> Result<ReconstructionGrid>
where
    F: Fn(usize, f64) -> Result<f64> + Sync,
{
    let active = grid.active();
    let points: Vec<Vec<f64>> = active.iter().map(|&p| grid.point(p)).collect();
    let steps: Vec<f64> = grid.spacing.iter().map(|h| DIVERGENCE_STEP_RATIO * h).collect();
    let values = backproject_points(&points, &steps, domain, boundary, constant, variant, radial)?;
    let mut out = grid.clone();
    out.values.iter_mut().for_each(|v| *v = 0.0);
    for (&p, v) in active.iter().zip(values) {
        out.values[p] = v;
    }
    Ok(out)
}

/// Back-projection over the boundary quadrature with a per-node radial
/// factor `radial(i, d)`, `d = |x_i - x0|`.
///
/// Variant (a) back-projects `V(x) = sum_i w_i nu_i radial(i, |x_i - x|)`
/// and returns `constant * div V`, with fourth-order centred differences of
/// step `steps[axis]`, shifted or lowered in order where stencil points
/// would leave the domain. Variant (b) returns
/// `constant * sum_i w_i nu_i . (x0 - x_i) radial(i, d)`.
fn backproject_points<F>(
    points: &[Vec<f64>],
    steps: &[f64],
    domain: &Domain,
    boundary: &BoundaryQuadrature,
    constant: f64,
    variant: Variant,
    radial: F,
) -> Result<Vec<f64>>
where
    F: Fn(usize, f64) -> Result<f64> + Sync,
{
    let component = |x0: &[f64], axis: usize| -> Result<f64> {
        let mut acc = 0.0;
        for i in 0..boundary.len() {
            let r = radial(i, distance(&boundary.points[i], x0))?;
            acc += boundary.weights[i] * boundary.normals[i][axis] * r;
        }
        Ok(acc)
    };
    points
        .par_iter()
        .map(|x0| match variant {
            Variant::B => {
                let mut acc = 0.0;
                for i in 0..boundary.len() {
                    let x = &boundary.points[i];
                    let proj: f64 = boundary.normals[i]
                        .iter()
                        .zip(x0.iter().zip(x))
                        .map(|(v, (a, b))| v * (a - b))
                        .sum();
                    acc += boundary.weights[i] * proj * radial(i, distance(x, x0))?;
                }
                Ok(constant * acc)
            }
            Variant::A => {
                let mut div = 0.0;
                for (axis, &step) in steps.iter().enumerate() {
                    div += axis_derivative(domain, x0, axis, step, |x| component(x, axis))?;
                }
                Ok(constant * div)
            }
        })
        .collect()
}

/// Candidate stencil windows, most accurate first: fourth order centred,
/// then shifted, then second and first order.
const WINDOWS: [(isize, isize); 10] = [
    (-2, 2),
    (-1, 3),
    (-3, 1),
    (0, 4),
    (-4, 0),
    (-1, 1),
    (0, 2),
    (-2, 0),
    (0, 1),
    (-1, 0),
];

/// `d f / d x_axis` at `x0` from samples at `x0 + o step e_axis` that lie
/// inside the domain.
fn axis_derivative(
    domain: &Domain,
    x0: &[f64],
    axis: usize,
    step: f64,
    f: impl Fn(&[f64]) -> Result<f64>,
) -> Result<f64> {
    let shifted = |o: isize| {
        let mut x = x0.to_vec();
        x[axis] += o as f64 * step;
        x
    };
    for (lo, hi) in WINDOWS {
        let mut inside = true;
        for o in lo..=hi {
            if o != 0 && !domain.contains(&shifted(o))? {
                inside = false;
                break;
            }
        }
        if inside {
            let nodes: Vec<f64> = (lo..=hi).map(|o| o as f64).collect();
            let w = &fornberg(0.0, &nodes, 1)[1];
            let mut sum = 0.0;
            for (o, w) in (lo..=hi).zip(w) {
                if *w != 0.0 {
                    sum += w * f(&shifted(o))?;
                }
            }
            return Ok(sum / step);
        }
    }
    Err(Error::InsufficientGrid(format!(
        "no stencil along axis {axis} fits inside the domain at {x0:?}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;

    #[test]
    fn divergence_stencils_are_exact_on_quartics() {
        let d = DomainSpec::Ellipsoid {
            semi_axes: vec![1.0, 0.5],
        }
        .build()
        .unwrap();
        let f = |x: &[f64]| Ok(x[0].powi(4) + x[1].powi(3));
        for x in [[0.0, 0.0], [0.9, 0.0], [-0.95, 0.1], [0.1, 0.45]] {
            let dx = axis_derivative(&d, &x, 0, 0.02, f).unwrap();
            let dy = axis_derivative(&d, &x, 1, 0.02, f).unwrap();
            assert!((dx - 4.0 * x[0].powi(3)).abs() < 1e-9, "{x:?}");
            assert!((dy - 3.0 * x[1] * x[1]).abs() < 1e-9, "{x:?}");
        }
        assert!(axis_derivative(&d, &[0.0, 0.0], 1, 0.6, f).is_err());
    }
}

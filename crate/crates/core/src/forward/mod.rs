//! Phantoms, the spherical-mean transform and wave data synthesised from it.

mod data;
mod means;
mod phantom;
mod wave;

pub use data::{
    DataKind, DataMetadata, Normalization, SphericalMeanData, WaveData, BOUNDARY_FILE,
    METADATA_FILE, VALUES_FILE,
};
pub use means::{spherical_mean, spherical_mean_direct};
pub use phantom::{eval_phantom, Bump, Phantom, SUPPORT_MARGIN};
pub use wave::{wave_from_means_even, wave_from_means_odd};
pub(crate) use wave::{check_means, weighted_stack};

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::geometry::{check_dim, Domain};
use crate::transforms::GridSpec;

/// Radius grid extent relative to the domain diameter.
pub const RADIUS_PADDING: f64 = 1.05;

/// Samples `M f` on a boundary quadrature of the given resolution and on
/// `radial_res` radii spanning `[0, 1.05 diam]`.
pub fn forward_data(
    phantom: &Phantom,
    domain: &Domain,
    boundary_res: usize,
    radial_res: usize,
) -> Result<SphericalMeanData> {
    check_dim(domain.dim(), phantom.dim)?;
    phantom.validate()?;
    phantom.check_inside(domain)?;
    if radial_res < 16 {
        return Err(invalid("radial_res", "need at least 16 radii"));
    }
    let boundary = domain.boundary_quadrature(boundary_res)?;
    let radii = GridSpec::spanning(0.0, RADIUS_PADDING * domain.diameter(), radial_res)?;
    let values = boundary
        .points
        .par_iter()
        .map(|x| {
            radii
                .coords()
                .map(|r| spherical_mean(phantom, x, r))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SphericalMeanData {
        meta: DataMetadata {
            kind: DataKind::SphericalMeans,
            dim: domain.dim(),
            domain: domain.spec(),
            phantom: Some(phantom.clone()),
            grid: radii,
            boundary_resolution: boundary_res,
            boundary_nodes: boundary.len(),
            normalization: Normalization::UnitSphereAverage,
        },
        boundary,
        values,
    })
}

pub(crate) fn wave_meta(means: &DataMetadata, times: GridSpec) -> DataMetadata {
    DataMetadata {
        kind: DataKind::Wave,
        grid: times,
        ..means.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;

    fn disk() -> Domain {
        DomainSpec::Ellipsoid {
            semi_axes: vec![1.0, 1.0],
        }
        .build()
        .unwrap()
    }

    fn centred(n: usize, radius: f64, k: u32) -> Phantom {
        Phantom::new(
            n,
            vec![Bump {
                center: vec![0.0; n],
                radius,
                smoothness: k,
                amplitude: 1.0,
            }],
        )
        .unwrap()
    }

    #[test]
    fn zero_phantom_gives_zero_data() {
        let d = forward_data(&Phantom::zero(2), &disk(), 16, 64).unwrap();
        assert!(d.values.iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn rows_vanish_beyond_the_diameter_and_agree_by_symmetry() {
        let d = forward_data(&centred(2, 0.4, 6), &disk(), 32, 128).unwrap();
        let grid = d.grid();
        for row in &d.values {
            for (j, v) in row.iter().enumerate() {
                if grid.coord(j) > 2.0 {
                    assert_eq!(*v, 0.0);
                }
            }
            for (a, b) in row.iter().zip(&d.values[0]) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn directory_round_trip_is_bit_exact() {
        let p = Phantom::new(
            2,
            vec![Bump {
                center: vec![0.1, -0.2],
                radius: 0.3,
                smoothness: 6,
                amplitude: 0.7,
            }],
        )
        .unwrap();
        let d = forward_data(&p, &disk(), 16, 64).unwrap();
        let dir = tempfile::tempdir().unwrap();
        d.write_dir(dir.path()).unwrap();
        let back = SphericalMeanData::read_dir(dir.path()).unwrap();
        assert_eq!(d, back);
        assert!(WaveData::read_dir(dir.path()).is_err());
    }

    #[test]
    fn kirchhoff_wave_has_sharp_trailing_edge() {
        let ball = DomainSpec::Ellipsoid {
            semi_axes: vec![1.0; 3],
        }
        .build()
        .unwrap();
        let p = centred(3, 0.4, 7);
        let d = forward_data(&p, &ball, 8, 1024).unwrap();
        let w = wave_from_means_odd(&d, 3).unwrap();
        let grid = w.grid();
        let peak = w.values[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for row in &w.values {
            assert_eq!(row[0], 0.0);
            for (j, v) in row.iter().enumerate() {
                if grid.coord(j) > 1.4 + 4.0 * grid.step {
                    assert!(v.abs() <= 1e-9 * peak);
                }
            }
        }
        // n = 3: p = d/dr (r M f).
        let j = 400;
        let r = grid.coord(j);
        let h = 1e-5;
        let x = &d.boundary.points[0];
        let m = |r: f64| r * spherical_mean(&p, x, r).unwrap();
        let fd = (m(r + h) - m(r - h)) / (2.0 * h);
        assert!((w.values[0][j] - fd).abs() < 1e-6 * peak);
    }
}

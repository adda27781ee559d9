use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{check_means, weighted_stack, DataMetadata, SphericalMeanData};
use crate::geometry::BoundaryQuadrature;
use crate::transforms::{derivative, ProfileGrid, Symmetry};

/// The two equivalent forms of every inversion formula: (a) back-projects a
/// vector field and takes its divergence, (b) moves the derivative onto the
/// data and needs no outer derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    A,
    #[default]
    B,
}

/// Rowwise filtered means on the radius grid of the source data.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredData {
    pub meta: DataMetadata,
    pub boundary: BoundaryQuadrature,
    pub values: Vec<Vec<f64>>,
    pub n: usize,
    pub variant: Variant,
}

impl FilteredData {
    pub fn row(&self, i: usize) -> ProfileGrid {
        ProfileGrid::from_grid(self.meta.grid, self.values[i].clone()).expect("rows match the grid")
    }
}

/// With `F = D_r^(n-2) r^(n-2) M f`, variant (a) stores `r F` for even `n`
/// and `F` for odd `n`; variant (b) stores `dF/dr`.
pub fn filter_data(data: &SphericalMeanData, n: usize, variant: Variant) -> Result<FilteredData> {
    check_means(data, n)?;
    let symmetry = if n % 2 == 0 {
        Symmetry::EvenAtOrigin
    } else {
        Symmetry::None
    };
    let values = (0..data.values.len())
        .map(|i| filter_row(&data.row(i), n, variant, symmetry))
        .collect::<Result<Vec<_>>>()?;
    Ok(FilteredData {
        meta: data.meta.clone(),
        boundary: data.boundary.clone(),
        values,
        n,
        variant,
    })
}

fn filter_row(row: &ProfileGrid, n: usize, variant: Variant, symmetry: Symmetry) -> Result<Vec<f64>> {
    let stack = weighted_stack(row, n, n - 2).map_err(|e| match e {
        Error::InsufficientGrid(m) => Error::InsufficientGrid(format!("filter depth {}: {m}", n - 2)),
        e => e,
    })?;
    Ok(match variant {
        Variant::A if n % 2 == 0 => stack
            .samples()
            .iter()
            .enumerate()
            .map(|(j, v)| stack.coord(j) * v)
            .collect(),
        Variant::A => stack.into_samples(),
        Variant::B => derivative(&stack, 1, symmetry)?.into_samples(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{forward_data, Bump, Phantom};
    use crate::geometry::DomainSpec;

    fn data(n: usize) -> SphericalMeanData {
        let d = DomainSpec::Ellipsoid {
            semi_axes: vec![1.0; n],
        }
        .build()
        .unwrap();
        let mut c = vec![0.0; n];
        c[0] = 0.2;
        let p = Phantom::new(
            n,
            vec![Bump {
                center: c,
                radius: 0.4,
                smoothness: n as u32 + 4,
                amplitude: 1.0,
            }],
        )
        .unwrap();
        forward_data(&p, &d, 8, 256).unwrap()
    }

    #[test]
    fn planar_variant_a_is_r_times_means() {
        let d = data(2);
        let f = filter_data(&d, 2, Variant::A).unwrap();
        for (row, frow) in d.values.iter().zip(&f.values) {
            for (j, (m, v)) in row.iter().zip(frow).enumerate() {
                assert_eq!(*v, d.grid().coord(j) * m);
            }
        }
    }

    #[test]
    fn three_d_variant_a_is_d_r_of_r_means() {
        let d = data(3);
        let f = filter_data(&d, 3, Variant::A).unwrap();
        let g = d.grid();
        let row = d.row(0);
        for j in [60, 100, 140] {
            let r = g.coord(j);
            let h = 1e-4;
            let rm = |s: f64| s * row.interpolate(s).unwrap();
            let fd = (rm(r + h) - rm(r - h)) / (2.0 * h) / (2.0 * r);
            assert!((f.values[0][j] - fd).abs() < 1e-4 * fd.abs().max(1e-3), "{j}");
        }
    }

    #[test]
    fn zero_data_filter_to_zero() {
        let mut d = data(3);
        d.values.iter_mut().flatten().for_each(|v| *v = 0.0);
        for variant in [Variant::A, Variant::B] {
            let f = filter_data(&d, 3, variant).unwrap();
            assert!(f.values.iter().flatten().all(|v| *v == 0.0));
        }
        assert!(filter_data(&d, 2, Variant::A).is_err());
    }
}

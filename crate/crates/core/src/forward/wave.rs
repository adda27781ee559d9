use std::f64::consts::PI;

use rayon::prelude::*;

use super::{Normalization, SphericalMeanData, WaveData};
use crate::error::{invalid, Error, Result};
use crate::geometry::unit_sphere_area;
use crate::transforms::{ddr_stack, derivative, GridSpec, ProfileGrid, Symmetry};

pub(crate) fn check_means(data: &SphericalMeanData, n: usize) -> Result<()> {
    if data.dim() != n {
        return Err(Error::Mismatch(format!(
            "data are {}-dimensional, requested n = {n}",
            data.dim()
        )));
    }
    if data.meta.normalization != Normalization::UnitSphereAverage {
        return Err(Error::Mismatch("means must be unit-sphere averages".into()));
    }
    if !data.grid().starts_at_zero() {
        return Err(invalid("radii", "radius grid must start at r = 0"));
    }
    Ok(())
}

/// `r^(n-2) M f` followed by `m` applications of `(2r)^-1 d/dr`.
pub(crate) fn weighted_stack(row: &ProfileGrid, n: usize, m: usize) -> Result<ProfileGrid> {
    let grid = row.grid();
    let weighted: Vec<f64> = row
        .samples()
        .iter()
        .enumerate()
        .map(|(j, v)| v * grid.coord(j).powi(n as i32 - 2))
        .collect();
    ddr_stack(&ProfileGrid::from_grid(grid, weighted)?, m)
}

/// Wave data in odd dimension from spherical means:
/// `p = w_{n-1} / (4 pi^((n-1)/2)) d/dr D_r^((n-3)/2) r^(n-2) M f`,
/// sampled on the radius grid read as times.
pub fn wave_from_means_odd(data: &SphericalMeanData, n: usize) -> Result<WaveData> {
    if n < 3 || n % 2 == 0 {
        return Err(invalid("n", "odd-dimensional synthesis needs odd n >= 3"));
    }
    check_means(data, n)?;
    let c = unit_sphere_area(n)? / (4.0 * PI.powf(0.5 * (n as f64 - 1.0)));
    let values = (0..data.values.len())
        .into_par_iter()
        .map(|i| {
            let stack = weighted_stack(&data.row(i), n, (n - 3) / 2)?;
            let p = derivative(&stack, 1, Symmetry::None)?;
            Ok(p.samples().iter().map(|v| c * v).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(WaveData {
        meta: super::wave_meta(&data.meta, data.grid()),
        boundary: data.boundary.clone(),
        values,
    })
}

/// Wave data in even dimension from spherical means,
/// `p(t) = w_{n-1} / (2 pi^(n/2)) 2t int_0^t r h(r) / sqrt(t^2 - r^2) dr`
/// with `h = D_r^(n/2) r^(n-2) M f`. The Abel integral is evaluated by
/// product integration: `h` is taken piecewise linear between radius nodes
/// and integrated exactly against the square-root kernel.
pub fn wave_from_means_even(data: &SphericalMeanData, n: usize, times: GridSpec) -> Result<WaveData> {
    if n < 2 || n % 2 == 1 {
        return Err(invalid("n", "even-dimensional synthesis needs even n >= 2"));
    }
    check_means(data, n)?;
    if times.start < 0.0 {
        return Err(invalid("times", "times must be non-negative"));
    }
    if times.last() < data.grid().last() {
        return Err(Error::InsufficientGrid(format!(
            "time grid ends at {} before the data support {}",
            times.last(),
            data.grid().last()
        )));
    }
    let c = unit_sphere_area(n)? / (2.0 * PI.powf(0.5 * n as f64));
    let radii = data.grid();
    let values = (0..data.values.len())
        .into_par_iter()
        .map(|i| {
            let h = weighted_stack(&data.row(i), n, n / 2)?;
            Ok(times
                .coords()
                .map(|t| 2.0 * c * t * abel_product(h.samples(), radii, t))
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(WaveData {
        meta: super::wave_meta(&data.meta, times),
        boundary: data.boundary.clone(),
        values,
    })
}

/// `int_0^t r h(r) / sqrt(t^2 - r^2) dr` for piecewise-linear `h` on `grid`.
fn abel_product(h: &[f64], grid: GridSpec, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let Some(first) = h.iter().position(|v| *v != 0.0) else {
        return 0.0;
    };
    let last = h.iter().rposition(|v| *v != 0.0).unwrap_or(first);
    let lo = first.saturating_sub(1);
    let hi = (last + 1).min(h.len() - 1);
    let t2 = t * t;
    // Antiderivatives of r and r^2 against the kernel, up to constants.
    let f1 = |r: f64| -(t2 - r * r).max(0.0).sqrt();
    let f2 = |r: f64| {
        let q = (r / t).min(1.0);
        0.5 * t2 * q.asin() - 0.5 * r * (t2 - r * r).max(0.0).sqrt()
    };
    let a = grid.coord(lo);
    if a >= t {
        return 0.0;
    }
    let mut sum = 0.0;
    let (mut fa1, mut fa2) = (f1(a), f2(a));
    for j in lo..hi {
        let ra = grid.coord(j);
        let rb = grid.coord(j + 1);
        let b = rb.min(t);
        let beta = (h[j + 1] - h[j]) / grid.step;
        let alpha = h[j] - beta * ra;
        let (fb1, fb2) = (f1(b), f2(b));
        sum += alpha * (fb1 - fa1) + beta * (fb2 - fa2);
        if rb >= t {
            break;
        }
        fa1 = fb1;
        fa2 = fb2;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abel_product_is_exact_for_linear_profiles() {
        let grid = GridSpec::spanning(0.0, 2.0, 201).unwrap();
        let h: Vec<f64> = grid.coords().map(|r| 1.0 + 0.5 * r).collect();
        let t = 1.37;
        // int_0^t r (1 + r/2) / sqrt(t^2 - r^2) dr = t + pi t^2 / 8.
        let exact = t + PI * t * t / 8.0;
        assert!((abel_product(&h, grid, t) - exact).abs() < 1e-12);
    }
}

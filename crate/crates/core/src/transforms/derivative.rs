use nalgebra::{DMatrix, DVector};

use super::stencil::{grid_derivative, WIDTH};
use super::ProfileGrid;
use crate::error::{invalid, Error, Result};

/// `order`-th derivative at `s_eval` from a least-squares polynomial of
/// degree `order + 4` fitted to the nearest `2K + 1` samples.
pub fn d_s_derivative(profile: &ProfileGrid, order: usize, s_eval: f64) -> Result<f64> {
    if order == 0 {
        return Err(invalid("order", "must be at least 1"));
    }
    let degree = order + 4;
    let half = degree / 2 + 2;
    let (lo, hi) = fit_window(profile, half, s_eval)?;
    let h = profile.step();
    let rows = hi - lo + 1;
    let vandermonde = DMatrix::from_fn(rows, degree + 1, |i, p| {
        ((profile.coord(lo + i) - s_eval) / h).powi(p as i32)
    });
    let rhs = DVector::from_iterator(rows, profile.samples()[lo..=hi].iter().copied());
    let coeffs = vandermonde
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::InsufficientGrid(e.to_string()))?;
    let factorial: f64 = (1..=order).map(|k| k as f64).product();
    Ok(coeffs[order] * factorial / h.powi(order as i32))
}

/// Index window `[lo, hi]` of `2 * half + 1` samples centred on the sample
/// nearest to `s`.
fn fit_window(profile: &ProfileGrid, half: usize, s: f64) -> Result<(usize, usize)> {
    let u = (s - profile.start()) / profile.step();
    let centre = u.round();
    if !u.is_finite() || centre < half as f64 || centre + (half as f64) > (profile.len() - 1) as f64 {
        return Err(Error::InsufficientGrid(format!(
            "s = {s} needs {half} samples on either side inside [{}, {}]",
            profile.start(),
            profile.last()
        )));
    }
    let c = centre as usize;
    Ok((c - half, c + half))
}

/// How data extend past the first grid point when it sits at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// No extension; shifted one-sided stencils at both ends.
    None,
    /// Even reflection `g(-r) = g(r)` about a grid starting at zero.
    EvenAtOrigin,
}

/// `order`-th derivative (1 or 2) on the grid with sixth-order stencils.
pub fn derivative(profile: &ProfileGrid, order: usize, symmetry: Symmetry) -> Result<ProfileGrid> {
    if !(1..=2).contains(&order) {
        return Err(invalid("order", "grid derivatives support orders 1 and 2"));
    }
    if profile.len() < WIDTH {
        return Err(Error::InsufficientGrid(format!("need at least {WIDTH} samples")));
    }
    let even = symmetry == Symmetry::EvenAtOrigin && profile.grid().starts_at_zero();
    let d = grid_derivative(profile.samples(), profile.step(), order, even);
    ProfileGrid::from_grid(profile.grid(), d)
}

/// Applies `D_r = (2r)^-1 d/dr` `m` times. A grid starting at `r = 0` is
/// treated as the symmetry axis of an even function, where `D_r g` takes
/// its limit `g''(0) / 2`.
pub fn ddr_stack(profile: &ProfileGrid, m: usize) -> Result<ProfileGrid> {
    let grid = profile.grid();
    if grid.start < 0.0 && !grid.starts_at_zero() {
        return Err(invalid("profile", "radial grid must start at r >= 0"));
    }
    if profile.len() < 2 * WIDTH {
        return Err(Error::InsufficientGrid(format!(
            "D_r stack needs at least {} samples",
            2 * WIDTH
        )));
    }
    let at_origin = grid.starts_at_zero();
    let mut g = profile.samples().to_vec();
    for _ in 0..m {
        let d1 = grid_derivative(&g, grid.step, 1, at_origin);
        let mut next: Vec<f64> = d1
            .iter()
            .enumerate()
            .map(|(j, d)| d / (2.0 * grid.coord(j)))
            .collect();
        if at_origin {
            next[0] = 0.5 * grid_derivative(&g[..2 * WIDTH], grid.step, 2, true)[0];
        }
        g = next;
    }
    ProfileGrid::from_grid(grid, g)
}

#[cfg(test)]
mod tests {
    use super::super::GridSpec;
    use super::*;

    fn profile(lo: f64, step: f64, len: usize, f: impl Fn(f64) -> f64) -> ProfileGrid {
        ProfileGrid::from_fn(GridSpec::new(lo, step, len).unwrap(), f)
    }

    #[test]
    fn polynomial_derivatives() {
        let p = profile(-2.0, 0.01, 401, |s| s * s);
        for s in [-1.0, 0.0, 0.333, 1.5] {
            assert!((d_s_derivative(&p, 2, s).unwrap() - 2.0).abs() < 1e-6);
        }
        let p = profile(-2.0, 0.01, 401, |s| s * s * s);
        assert!((d_s_derivative(&p, 1, 1.0).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn third_derivative_of_ball_profile_vanishes() {
        let p = profile(-1.0, 2.0 / 1000.0, 1001, |s| std::f64::consts::PI * (1.0 - s * s));
        let d = d_s_derivative(&p, 3, 0.2).unwrap();
        assert!(d.abs() < 1e-6, "{d}");
    }

    #[test]
    fn rejects_evaluation_near_grid_end() {
        let p = profile(0.0, 0.1, 20, |s| s);
        assert!(matches!(d_s_derivative(&p, 2, 0.1), Err(Error::InsufficientGrid(_))));
        assert!(d_s_derivative(&p, 0, 1.0).is_err());
    }

    #[test]
    fn ddr_of_even_monomials() {
        let p = profile(0.0, 0.01, 200, |r| r * r);
        let d = ddr_stack(&p, 1).unwrap();
        assert!(d.samples().iter().all(|v| (v - 1.0).abs() < 1e-9));
        let p = profile(0.0, 0.01, 200, |r| r.powi(4));
        let d = ddr_stack(&p, 2).unwrap();
        assert!(d.samples().iter().all(|v| (v - 2.0).abs() < 1e-6), "{:?}", &d.samples()[..4]);
    }

    #[test]
    fn ddr_of_gaussian() {
        let p = profile(0.0, 1e-3, 3001, |r| (-r * r).exp());
        let d = ddr_stack(&p, 1).unwrap();
        let err = d
            .samples()
            .iter()
            .enumerate()
            .map(|(j, v)| (v + (-(p.coord(j)).powi(2)).exp()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn ddr_is_linear() {
        let a = profile(0.0, 0.02, 100, |r| (r * 1.3).cos());
        let b = profile(0.0, 0.02, 100, |r| (-r * r).exp());
        let sum = ProfileGrid::from_grid(
            a.grid(),
            a.samples().iter().zip(b.samples()).map(|(x, y)| 2.0 * x + y).collect(),
        )
        .unwrap();
        let da = ddr_stack(&a, 2).unwrap();
        let db = ddr_stack(&b, 2).unwrap();
        let ds = ddr_stack(&sum, 2).unwrap();
        for j in 0..a.len() {
            let lin = 2.0 * da.samples()[j] + db.samples()[j];
            assert!((ds.samples()[j] - lin).abs() <= 1e-9 * lin.abs().max(1.0));
        }
    }
}

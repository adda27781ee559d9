use crate::error::{invalid, Result};
use crate::quadrature::gauss_legendre_on;
use std::f64::consts::PI;

/// Surface quadrature of a domain boundary: points, outward unit normals and
/// positive surface-measure weights.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryQuadrature {
    pub points: Vec<Vec<f64>>,
    pub normals: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl BoundaryQuadrature {
    pub fn new(points: Vec<Vec<f64>>, normals: Vec<Vec<f64>>, weights: Vec<f64>) -> Self {
        debug_assert_eq!(points.len(), normals.len());
        debug_assert_eq!(points.len(), weights.len());
        Self {
            points,
            normals,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Parameter-average of the boundary points.
    pub fn centroid(&self) -> Vec<f64> {
        let n = self.dim();
        let mut c = vec![0.0; n];
        for p in &self.points {
            for (ci, pi) in c.iter_mut().zip(p) {
                *ci += pi;
            }
        }
        let m = self.len().max(1) as f64;
        c.iter_mut().for_each(|v| *v /= m);
        c
    }
}

/// Quadrature on the unit sphere `S^{n-1}`: trapezoid in the azimuth with
/// `resolution` nodes and Gauss–Legendre with `resolution / 2` nodes in
/// every polar angle.
pub(crate) fn unit_sphere_rule(n: usize, resolution: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    if n < 1 {
        return Err(invalid("n", "dimension must be at least 1"));
    }
    if n == 1 {
        return Ok(vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)]);
    }
    if n == 2 {
        let h = 2.0 * PI / resolution as f64;
        return Ok((0..resolution)
            .map(|k| {
                let phi = k as f64 * h;
                (vec![phi.cos(), phi.sin()], h)
            })
            .collect());
    }
    let inner = unit_sphere_rule(n - 1, resolution)?;
    let (thetas, wts) = gauss_legendre_on((resolution / 2).max(2), 0.0, PI);
    let mut out = Vec::with_capacity(thetas.len() * inner.len());
    for (theta, wt) in thetas.iter().zip(&wts) {
        let (s, c) = theta.sin_cos();
        let jac = s.powi(n as i32 - 2);
        for (tau, wtau) in &inner {
            let mut sigma = Vec::with_capacity(n);
            sigma.push(c);
            sigma.extend(tau.iter().map(|t| s * t));
            out.push((sigma, wt * jac * wtau));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unit_sphere_area;

    #[test]
    fn sphere_rule_areas() {
        for n in 2..=5 {
            let rule = unit_sphere_rule(n, 32).unwrap();
            let area: f64 = rule.iter().map(|(_, w)| w).sum();
            assert!(
                (area / unit_sphere_area(n).unwrap() - 1.0).abs() < 1e-11,
                "n = {n}: {area}"
            );
            for (s, _) in &rule {
                let norm: f64 = s.iter().map(|v| v * v).sum();
                assert!((norm - 1.0).abs() < 1e-14);
            }
        }
    }
}

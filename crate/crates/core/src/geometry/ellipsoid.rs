use super::{boundary::unit_sphere_rule, BoundaryQuadrature};
use crate::error::{invalid, Result};

/// `{ x : |A^-1 x|^2 < 1 }` for a positive diagonal matrix `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    semi_axes: Vec<f64>,
}

impl Ellipsoid {
    pub fn new(semi_axes: Vec<f64>) -> Result<Self> {
        if semi_axes.len() < 2 {
            return Err(invalid("semi_axes", "dimension must be at least 2"));
        }
        if semi_axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(invalid("semi_axes", "all semi-axes must be positive"));
        }
        Ok(Self { semi_axes })
    }

    pub fn ball(n: usize, radius: f64) -> Result<Self> {
        Self::new(vec![radius; n])
    }

    pub fn dim(&self) -> usize {
        self.semi_axes.len()
    }

    pub fn semi_axes(&self) -> &[f64] {
        &self.semi_axes
    }

    pub fn is_ball(&self) -> bool {
        self.semi_axes.iter().all(|a| *a == self.semi_axes[0])
    }

    pub fn det(&self) -> f64 {
        self.semi_axes.iter().product()
    }

    /// `|A^-1 x|^2`.
    pub fn level(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.semi_axes)
            .map(|(x, a)| (x / a) * (x / a))
            .sum()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.level(x) < 1.0
    }

    /// Support function `max_{x in closure} omega . x = |A omega|`.
    pub fn support(&self, omega: &[f64]) -> f64 {
        omega
            .iter()
            .zip(&self.semi_axes)
            .map(|(w, a)| (w * a) * (w * a))
            .sum::<f64>()
            .sqrt()
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.semi_axes.iter().cloned().fold(0.0, f64::max)
    }

    /// Euclidean distance to the boundary (exact up to bisection tolerance)
    /// for points inside the closure.
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        // Closest boundary point y_i = a_i^2 x_i / (a_i^2 + lambda), with
        // lambda in (-min a^2, 0] chosen so that |A^-1 y| = 1.
        let level = |lambda: f64| -> f64 {
            x.iter()
                .zip(&self.semi_axes)
                .map(|(x, a)| {
                    if *x == 0.0 {
                        return 0.0;
                    }
                    let t = a * x / (a * a + lambda);
                    t * t
                })
                .sum()
        };
        if self.level(x) >= 1.0 {
            return 0.0;
        }
        let amin2 = self
            .semi_axes
            .iter()
            .map(|a| a * a)
            .fold(f64::INFINITY, f64::min);
        let mut lo = -amin2;
        let mut hi = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            // level decreases in lambda
            if level(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);
        let mut y: Vec<f64> = x
            .iter()
            .zip(&self.semi_axes)
            .map(|(x, a)| {
                if *x == 0.0 {
                    0.0
                } else {
                    a * a * x / (a * a + lambda)
                }
            })
            .collect();
        // Inside the evolute the multiplier sticks at -min a^2 and the
        // closest point leaves the plane of the shortest axes; restore the
        // missing level along one of them.
        let reached = self.level(&y);
        if reached < 1.0 - 1e-12 {
            if let Some(i) = (0..x.len())
                .filter(|&i| (self.semi_axes[i] * self.semi_axes[i] - amin2).abs() <= 1e-12 * amin2)
                .max_by(|&i, &j| x[i].abs().total_cmp(&x[j].abs()))
            {
                let a = self.semi_axes[i];
                let others = reached - (y[i] / a).powi(2);
                let sign = if x[i] < 0.0 { -1.0 } else { 1.0 };
                y[i] = sign * a * (1.0 - others).max(0.0).sqrt();
            }
        }
        x.iter()
            .zip(&y)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    /// Product rule on the boundary: the unit-sphere rule mapped through
    /// `x = A sigma` with surface Jacobian `det(A) |A^-1 sigma|`.
    pub fn boundary_quadrature(&self, resolution: usize) -> Result<BoundaryQuadrature> {
        let n = self.dim();
        let rule = unit_sphere_rule(n, resolution)?;
        let det = self.det();
        let mut points = Vec::with_capacity(rule.len());
        let mut normals = Vec::with_capacity(rule.len());
        let mut weights = Vec::with_capacity(rule.len());
        for (sigma, w) in rule {
            let x: Vec<f64> = sigma.iter().zip(&self.semi_axes).map(|(s, a)| a * s).collect();
            let g: Vec<f64> = sigma.iter().zip(&self.semi_axes).map(|(s, a)| s / a).collect();
            let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            normals.push(g.iter().map(|v| v / gn).collect());
            points.push(x);
            weights.push(w * det * gn);
        }
        Ok(BoundaryQuadrature::new(points, normals, weights))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_axes() {
        assert!(Ellipsoid::new(vec![1.0]).is_err());
        assert!(Ellipsoid::new(vec![1.0, 0.0]).is_err());
        assert!(Ellipsoid::new(vec![1.0, -2.0]).is_err());
    }

    #[test]
    fn distance_to_boundary_of_ellipse() {
        let e = Ellipsoid::new(vec![2.0, 1.0]).unwrap();
        assert!((e.distance_to_boundary(&[0.0, 0.0]) - 1.0).abs() < 1e-12);
        assert!((e.distance_to_boundary(&[1.8, 0.0]) - 0.2).abs() < 1e-9);
        // Inside the evolute the nearest point is off-axis.
        let d = e.distance_to_boundary(&[1.0, 0.0]);
        assert!((d - (6.0f64 / 9.0).sqrt()).abs() < 1e-9, "{d}");
        let b = Ellipsoid::ball(3, 1.0).unwrap();
        assert!((b.distance_to_boundary(&[0.3, 0.0, 0.4]) - 0.5).abs() < 1e-12);
    }
}

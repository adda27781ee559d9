//! Bounded smooth convex domains, their boundaries and the midplane helpers
//! used by the smoothing kernel.

pub(crate) mod boundary;
mod ellipsoid;
mod polar;

pub use boundary::BoundaryQuadrature;
pub use ellipsoid::Ellipsoid;
pub use polar::{PolarShape, SmoothConvexDomain2D};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Serializable description of a domain, used in configuration files and in
/// data-set metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Ellipsoid {
        semi_axes: Vec<f64>,
    },
    /// `(s(x/a) + s(y/b)) < 1` with `s(u) = (u^2 + eps^2)^(p/2) - eps^p`;
    /// `smoothing = 0` gives the plain superellipse.
    Superellipse {
        a: f64,
        b: f64,
        p: f64,
        #[serde(default)]
        smoothing: f64,
    },
    /// Polar radius samples `rho(theta)` on a uniform grid over `[0, 2 pi)`.
    PolarTable {
        theta: Vec<f64>,
        rho: Vec<f64>,
    },
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        match self {
            DomainSpec::Ellipsoid { semi_axes } => {
                Ok(Domain::Ellipsoid(Ellipsoid::new(semi_axes.clone())?))
            }
            DomainSpec::Superellipse {
                a,
                b,
                p,
                smoothing,
            } => Ok(Domain::Smooth2D(SmoothConvexDomain2D::new(
                PolarShape::superellipse(*a, *b, *p, *smoothing)?,
            )?)),
            DomainSpec::PolarTable { theta, rho } => Ok(Domain::Smooth2D(
                SmoothConvexDomain2D::new(PolarShape::from_samples(theta, rho)?)?,
            )),
        }
    }
}

/// A bounded smooth convex region.
#[derive(Debug, Clone)]
pub enum Domain {
    Ellipsoid(Ellipsoid),
    Smooth2D(SmoothConvexDomain2D),
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Ellipsoid(e) => e.dim(),
            Domain::Smooth2D(_) => 2,
        }
    }

    pub fn spec(&self) -> DomainSpec {
        match self {
            Domain::Ellipsoid(e) => DomainSpec::Ellipsoid {
                semi_axes: e.semi_axes().to_vec(),
            },
            Domain::Smooth2D(d) => d.shape().spec(),
        }
    }

    pub fn is_ellipsoid(&self) -> bool {
        matches!(self, Domain::Ellipsoid(_))
    }

    /// True iff `x` lies strictly inside the domain.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            Domain::Ellipsoid(e) => e.contains(x),
            Domain::Smooth2D(d) => d.contains(x),
        })
    }

    pub fn boundary_quadrature(&self, resolution: usize) -> Result<BoundaryQuadrature> {
        if resolution < 8 {
            return Err(invalid("resolution", "must be at least 8"));
        }
        match self {
            Domain::Ellipsoid(e) => e.boundary_quadrature(resolution),
            Domain::Smooth2D(d) => Ok(d.boundary_quadrature(resolution)),
        }
    }

    /// Support interval `[min w.x, max w.x]` over the closure of the domain.
    pub fn support_interval(&self, omega: &[f64]) -> (f64, f64) {
        match self {
            Domain::Ellipsoid(e) => {
                let h = e.support(omega);
                (-h, h)
            }
            Domain::Smooth2D(d) => {
                let s = d.support(omega);
                (s.lo, s.hi)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Ellipsoid(e) => e.diameter(),
            Domain::Smooth2D(d) => d.diameter(),
        }
    }

    /// Half-extent of the axis-aligned bounding box along each axis.
    pub fn bounding_half_widths(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|k| {
                let mut e = vec![0.0; self.dim()];
                e[k] = 1.0;
                let (lo, hi) = self.support_interval(&e);
                lo.abs().max(hi.abs())
            })
            .collect()
    }

    /// Euclidean distance from an interior point to the boundary.
    pub fn distance_to_boundary(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            Domain::Ellipsoid(e) => e.distance_to_boundary(x),
            Domain::Smooth2D(d) => d.distance_to_boundary(x),
        })
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

/// The hyperplane of points equidistant from two given points.
#[derive(Debug, Clone, PartialEq)]
pub struct Midplane {
    pub omega_star: Vec<f64>,
    pub s_star: f64,
}

/// Unit normal `(x1 - x0)/|x1 - x0|` and signed offset
/// `(|x1|^2 - |x0|^2) / (2 |x1 - x0|)` of the midplane between `x0` and `x1`.
pub fn midplane(x0: &[f64], x1: &[f64]) -> Result<Midplane> {
    check_dim(x0.len(), x1.len())?;
    let dist = distance(x0, x1);
    if dist == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let omega_star: Vec<f64> = x0.iter().zip(x1).map(|(a, b)| (b - a) / dist).collect();
    let s_star = (norm_sq(x1) - norm_sq(x0)) / (2.0 * dist);
    Ok(Midplane { omega_star, s_star })
}

/// Surface area `2 pi^(n/2) / Gamma(n/2)` of the unit sphere in `R^n`.
pub fn unit_sphere_area(n: usize) -> Result<f64> {
    if n < 1 {
        return Err(invalid("n", "dimension must be at least 1"));
    }
    Ok(2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half_integer(n))
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    unit_sphere_area(n).expect("n >= 1") / n as f64
}

/// `Gamma(n/2)` for a positive integer `n`.
fn gamma_half_integer(n: usize) -> f64 {
    let (mut value, mut k) = if n % 2 == 0 {
        (1.0, 2usize)
    } else {
        (std::f64::consts::PI.sqrt(), 1usize)
    };
    while k < n {
        value *= k as f64 / 2.0;
        k += 2;
    }
    value
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(1).unwrap() - 2.0).abs() < 1e-15);
        assert!((unit_sphere_area(2).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3).unwrap() - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(4).unwrap() - 2.0 * PI * PI).abs() < 1e-13);
        assert!(unit_sphere_area(0).is_err());
        assert!((unit_ball_volume(2) - PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn midplane_examples() {
        let m = midplane(&[-1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!(m.omega_star, vec![1.0, 0.0]);
        assert_eq!(m.s_star, 0.0);
        let m = midplane(&[0.0, 0.0], &[2.0, 0.0]).unwrap();
        assert_eq!(m.omega_star, vec![1.0, 0.0]);
        assert!((m.s_star - 1.0).abs() < 1e-15);
        let m = midplane(&[0.0, 1.0], &[0.0, 3.0]).unwrap();
        assert_eq!(m.omega_star, vec![0.0, 1.0]);
        assert!((m.s_star - 2.0).abs() < 1e-15);
        assert!(matches!(
            midplane(&[0.5, 0.5], &[0.5, 0.5]),
            Err(Error::CoincidentPoints)
        ));
        assert!(matches!(
            midplane(&[0.5, 0.5], &[0.5, 0.5, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn contains_examples() {
        let disk = DomainSpec::Ellipsoid {
            semi_axes: vec![1.0, 1.0],
        }
        .build()
        .unwrap();
        assert!(disk.contains(&[0.0, 0.0]).unwrap());
        assert!(!disk.contains(&[1.0, 0.0]).unwrap());
        let ell = DomainSpec::Ellipsoid {
            semi_axes: vec![2.0, 1.0],
        }
        .build()
        .unwrap();
        assert!(ell.contains(&[1.5, 0.0]).unwrap());
        assert!(ell.contains(&[1.5, 0.0, 0.0]).is_err());
    }
}

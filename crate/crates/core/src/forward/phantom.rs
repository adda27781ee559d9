use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{check_dim, distance, unit_sphere_area, Domain};
use crate::quadrature::gauss_legendre_on;

/// Relative clearance (fraction of the domain diameter) required between a
/// bump support and the boundary.
pub const SUPPORT_MARGIN: f64 = 0.01;

/// `amplitude * max(0, 1 - |x - c|^2 / radius^2)^smoothness`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub smoothness: u32,
    pub amplitude: f64,
}

impl Bump {
    /// Radial profile as a function of the squared distance to the centre.
    pub(crate) fn profile_sq(&self, q: f64) -> f64 {
        let u = 1.0 - q / (self.radius * self.radius);
        if u <= 0.0 {
            0.0
        } else {
            self.amplitude * u.powi(self.smoothness as i32)
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let q: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        self.profile_sq(q)
    }

    /// `int_{R^n}` of the bump.
    pub fn integral(&self) -> f64 {
        let n = self.center.len();
        let (u, w) = gauss_legendre_on(64, 0.0, 1.0);
        let radial: f64 = u
            .iter()
            .zip(&w)
            .map(|(u, w)| w * (1.0 - u * u).powi(self.smoothness as i32) * u.powi(n as i32 - 1))
            .sum();
        self.amplitude * self.radius.powi(n as i32) * unit_sphere_area(n).expect("n >= 1") * radial
    }
}

/// A finite sum of polynomial bumps in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phantom {
    pub dim: usize,
    pub bumps: Vec<Bump>,
}

impl Phantom {
    pub fn new(dim: usize, bumps: Vec<Bump>) -> Result<Self> {
        let p = Self { dim, bumps };
        p.validate()?;
        Ok(p)
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            bumps: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(invalid("dim", "phantoms live in dimension >= 2"));
        }
        for b in &self.bumps {
            check_dim(self.dim, b.center.len())?;
            if !(b.radius > 0.0 && b.radius.is_finite()) {
                return Err(invalid("radius", "bump radius must be positive"));
            }
            if b.smoothness == 0 {
                return Err(invalid("smoothness", "bump exponent must be at least 1"));
            }
            if !b.amplitude.is_finite() || b.center.iter().any(|c| !c.is_finite()) {
                return Err(invalid("bump", "non-finite parameters"));
            }
        }
        Ok(())
    }

    /// Smallest bump exponent, or `None` for the zero phantom.
    pub fn min_smoothness(&self) -> Option<u32> {
        self.bumps.iter().map(|b| b.smoothness).min()
    }

    /// Every bump support must sit inside the domain with a clearance of at
    /// least [`SUPPORT_MARGIN`] times the domain diameter.
    pub fn check_inside(&self, domain: &Domain) -> Result<()> {
        check_dim(domain.dim(), self.dim)?;
        let margin = SUPPORT_MARGIN * domain.diameter();
        for (i, b) in self.bumps.iter().enumerate() {
            let inside = domain.contains(&b.center)?;
            let gap = if inside {
                domain.distance_to_boundary(&b.center)? - b.radius
            } else {
                f64::NEG_INFINITY
            };
            if gap < margin {
                return Err(Error::SupportOutsideDomain(format!(
                    "bump {i} (centre {:?}, radius {}) leaves clearance {gap:.4} < {margin:.4}",
                    b.center, b.radius
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.bumps.iter().map(|b| b.eval(x)).sum()
    }

    pub fn integral(&self) -> f64 {
        self.bumps.iter().map(Bump::integral).sum()
    }

    /// Distance from `x` to the nearest bump support (zero inside one).
    pub fn distance_to_support(&self, x: &[f64]) -> f64 {
        self.bumps
            .iter()
            .map(|b| (distance(x, &b.center) - b.radius).max(0.0))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Phantom value at `x`.
pub fn eval_phantom(phantom: &Phantom, x: &[f64]) -> Result<f64> {
    check_dim(phantom.dim, x.len())?;
    Ok(phantom.eval(x))
}

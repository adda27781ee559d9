//! The smoothing kernel `k(x0, x1)`, a filtered Radon value of the domain
//! indicator on the midplane of `x0` and `x1`, and the operator `K f`.

mod directional;

pub use directional::{DirectionalKernel, PUNCTURED_SAMPLES};

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use crate::error::{invalid, Error, Result};
use crate::forward::Phantom;
use crate::geometry::boundary::unit_sphere_rule;
use crate::geometry::{check_dim, distance, midplane, Domain};
use crate::quadrature::gauss_legendre_on;
use crate::transforms::HilbertKernel;

/// Default exclusion zone next to the support ends, as a fraction of the
/// support width.
pub const DEFAULT_EXCLUSION: f64 = 0.02;
/// Default number of Chebyshev nodes per direction.
pub const DEFAULT_CHEBYSHEV_NODES: usize = 256;
/// Angular spacing of the planar direction cache (radians, approximately).
pub const DIRECTION_STEP: f64 = 1e-3;

/// The Hilbert orientation used inside the kernel: convolution with the
/// principal value of `1 / (pi s)`.
pub const KERNEL_HILBERT: HilbertKernel = HilbertKernel::Backward;

/// How the filtered Radon values `d^n/ds^n [H] R chi(w, s)` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelPath {
    /// Closed form for ellipsoids: the filtered profile is identically zero
    /// inside the support.
    Analytic,
    /// Square-root weighted Chebyshev expansion of the slice profile with
    /// exact Hilbert transform and derivatives (even `n`); odd `n` falls
    /// back to the uniform route, which needs no Hilbert transform.
    Chebyshev,
    /// Uniform profile grid, FFT-convolved Hilbert transform and local
    /// polynomial differentiation.
    Uniform,
}

/// Evaluates `k(x0, x1)` for one domain, caching per-direction data for
/// planar domains.
pub struct KernelEvaluator {
    domain: Domain,
    n: usize,
    path: KernelPath,
    exclusion: f64,
    nodes: usize,
    cache: Vec<OnceLock<Arc<DirectionalKernel>>>,
}

impl std::fmt::Debug for KernelEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelEvaluator")
            .field("n", &self.n)
            .field("path", &self.path)
            .field("exclusion", &self.exclusion)
            .field("nodes", &self.nodes)
            .finish()
    }
}

impl KernelEvaluator {
    /// Analytic path for ellipsoids, Chebyshev path otherwise.
    pub fn new(domain: Domain, n: usize) -> Result<Self> {
        let path = if domain.is_ellipsoid() {
            KernelPath::Analytic
        } else {
            KernelPath::Chebyshev
        };
        Self::with_path(domain, n, path)
    }

    pub fn with_path(domain: Domain, n: usize, path: KernelPath) -> Result<Self> {
        check_dim(domain.dim(), n)?;
        if path == KernelPath::Analytic && !domain.is_ellipsoid() {
            return Err(Error::Unsupported(
                "the closed-form kernel exists only for ellipsoids".into(),
            ));
        }
        let slots = if n == 2 {
            (2.0 * PI / DIRECTION_STEP).ceil() as usize
        } else {
            0
        };
        Ok(Self {
            domain,
            n,
            path,
            exclusion: DEFAULT_EXCLUSION,
            nodes: DEFAULT_CHEBYSHEV_NODES,
            cache: (0..slots).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn with_exclusion(mut self, fraction: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&fraction) {
            return Err(invalid("exclusion", "must lie in [0, 0.5)"));
        }
        self.exclusion = fraction;
        Ok(self)
    }

    pub fn with_chebyshev_nodes(mut self, nodes: usize) -> Result<Self> {
        if nodes < 8 {
            return Err(invalid("nodes", "need at least 8 Chebyshev nodes"));
        }
        self.nodes = nodes;
        self.cache.iter_mut().for_each(|c| *c = OnceLock::new());
        Ok(self)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn path(&self) -> KernelPath {
        self.path
    }

    /// `(-1)^((n-2)/2) / (2^(n+1) pi^(n-1))` for even `n`,
    /// `(-1)^((n-1)/2) / (2^(n+1) pi^(n-1))` for odd `n`.
    pub fn constant(&self) -> f64 {
        let n = self.n;
        let sign = if n % 2 == 0 {
            if ((n - 2) / 2) % 2 == 0 { 1.0 } else { -1.0 }
        } else if ((n - 1) / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        sign / (2f64.powi(n as i32 + 1) * PI.powi(n as i32 - 1))
    }

    /// Per-direction data for an arbitrary unit direction (not cached).
    pub fn directional(&self, omega: &[f64]) -> Result<DirectionalKernel> {
        DirectionalKernel::build(&self.domain, self.n, self.path, self.nodes, omega)
    }

    fn cached(&self, slot: usize) -> Result<Arc<DirectionalKernel>> {
        if let Some(d) = self.cache[slot].get() {
            return Ok(d.clone());
        }
        let theta = 2.0 * PI * slot as f64 / self.cache.len() as f64;
        let dir = Arc::new(self.directional(&[theta.cos(), theta.sin()])?);
        Ok(self.cache[slot].get_or_init(|| dir).clone())
    }

    /// `d^n/ds^n H R chi(w, s)` (even `n`) or `d^n/ds^n R chi(w, s)` (odd
    /// `n`). Planar directions are interpolated linearly between the two
    /// neighbouring cached directions.
    pub fn filtered_radon(&self, omega: &[f64], s: f64) -> Result<f64> {
        if self.path == KernelPath::Analytic {
            let (lo, hi) = self.domain.support_interval(omega);
            check_exclusion(s, lo, hi, self.exclusion)?;
            return Ok(0.0);
        }
        if self.n != 2 {
            return self.directional(omega)?.filtered(s, self.exclusion);
        }
        let slots = self.cache.len();
        let step = 2.0 * PI / slots as f64;
        let theta = omega[1].atan2(omega[0]).rem_euclid(2.0 * PI);
        let u = theta / step;
        let k0 = (u.floor() as usize) % slots;
        let t = u - u.floor();
        let a = self.cached(k0)?.filtered(s, self.exclusion)?;
        if t == 0.0 {
            return Ok(a);
        }
        let b = self.cached((k0 + 1) % slots)?.filtered(s, self.exclusion)?;
        Ok((1.0 - t) * a + t * b)
    }
}

pub(crate) fn check_exclusion(s: f64, lo: f64, hi: f64, fraction: f64) -> Result<()> {
    let margin = fraction * (hi - lo);
    if s <= lo + margin || s >= hi - margin {
        return Err(Error::TangencyExclusion { s, lo, hi });
    }
    Ok(())
}

fn check_interior(domain: &Domain, x: &[f64]) -> Result<()> {
    if !domain.contains(x)? {
        return Err(Error::OutsideDomain(x.to_vec()));
    }
    Ok(())
}

/// `k(x0, x1) = c_n F(w*, s*) / |x1 - x0|^(n-1)` with the midplane
/// `(w*, s*)` of the two points and `F` the filtered Radon value.
pub fn kernel_k(evaluator: &KernelEvaluator, x0: &[f64], x1: &[f64]) -> Result<f64> {
    let domain = &evaluator.domain;
    check_dim(evaluator.n, x0.len())?;
    check_dim(evaluator.n, x1.len())?;
    check_interior(domain, x0)?;
    check_interior(domain, x1)?;
    let mp = midplane(x0, x1)?;
    let f = evaluator.filtered_radon(&mp.omega_star, mp.s_star)?;
    Ok(evaluator.constant() * f / distance(x0, x1).powi(evaluator.n as i32 - 1))
}

/// `(K f)(x0) = int k(x0, x1) f(x1) dx1` in polar coordinates about `x0`.
/// Along the ray `x1 = x0 + rho sigma` the midplane is `(sigma, sigma . x0 +
/// rho / 2)`, so `k rho^(n-1)` is bounded and the integrand is smooth; each
/// ray is integrated with Gauss-Legendre over its intersection with every
/// bump support. The sphere of directions uses `volume_res` nodes per
/// angle. Planar directions go through the evaluator's direction cache.
pub fn smoothing_k(
    evaluator: &KernelEvaluator,
    phantom: &Phantom,
    x0: &[f64],
    volume_res: usize,
) -> Result<f64> {
    let n = evaluator.n;
    check_dim(n, x0.len())?;
    check_dim(n, phantom.dim)?;
    check_interior(&evaluator.domain, x0)?;
    if evaluator.path == KernelPath::Analytic || phantom.bumps.is_empty() {
        return Ok(0.0);
    }
    let radial_nodes = (volume_res / 2).max(16);
    let rule = unit_sphere_rule(n, volume_res)?;
    let mut total = 0.0;
    for (sigma, w) in &rule {
        let mut ray = 0.0;
        let mut dir: Option<DirectionalKernel> = None;
        let base: f64 = sigma.iter().zip(x0).map(|(a, b)| a * b).sum();
        for b in &phantom.bumps {
            let rel: Vec<f64> = x0.iter().zip(&b.center).map(|(a, c)| a - c).collect();
            let proj: f64 = sigma.iter().zip(&rel).map(|(a, c)| a * c).sum();
            let q: f64 = rel.iter().map(|v| v * v).sum::<f64>() - b.radius * b.radius;
            let disc = proj * proj - q;
            if disc <= 0.0 {
                continue;
            }
            let root = disc.sqrt();
            let (r1, r2) = ((-proj - root).max(0.0), -proj + root);
            if r2 <= 0.0 {
                continue;
            }
            let (rs, ws) = gauss_legendre_on(radial_nodes, r1, r2);
            for (rho, wr) in rs.iter().zip(&ws) {
                let x1: Vec<f64> = x0.iter().zip(sigma).map(|(a, s)| a + rho * s).collect();
                let f = b.eval(&x1);
                if f == 0.0 {
                    continue;
                }
                let s = base + 0.5 * rho;
                let filtered = if n == 2 {
                    evaluator.filtered_radon(sigma, s)?
                } else {
                    let d = match &dir {
                        Some(d) => d,
                        None => dir.insert(evaluator.directional(sigma)?),
                    };
                    d.filtered(s, evaluator.exclusion)?
                };
                ray += wr * f * filtered;
            }
        }
        total += w * ray;
    }
    Ok(evaluator.constant() * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;

    fn superellipse() -> Domain {
        DomainSpec::Superellipse {
            a: 1.0,
            b: 0.8,
            p: 3.0,
            smoothing: 0.1,
        }
        .build()
        .unwrap()
    }

    #[test]
    fn branch_constants() {
        let d = DomainSpec::Ellipsoid {
            semi_axes: vec![1.0; 5],
        }
        .build()
        .unwrap();
        let k = KernelEvaluator::new(d, 5).unwrap();
        assert!((k.constant() - 1.0 / (64.0 * PI.powi(4))).abs() < 1e-18);
        let k = KernelEvaluator::new(superellipse(), 2).unwrap();
        assert!((k.constant() - 1.0 / (8.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn analytic_path_vanishes() {
        let e = DomainSpec::Ellipsoid {
            semi_axes: vec![1.0, 0.7],
        }
        .build()
        .unwrap();
        let k = KernelEvaluator::new(e, 2).unwrap();
        assert_eq!(kernel_k(&k, &[0.1, 0.0], &[-0.2, 0.3]).unwrap(), 0.0);
        assert!(matches!(
            kernel_k(&k, &[0.1, 0.0], &[0.1, 0.0]),
            Err(Error::CoincidentPoints)
        ));
        assert!(matches!(
            kernel_k(&k, &[0.1, 0.0], &[1.1, 0.0]),
            Err(Error::OutsideDomain(_))
        ));
        assert!(KernelEvaluator::with_path(superellipse(), 2, KernelPath::Analytic).is_err());
    }

    #[test]
    fn chebyshev_path_on_an_ellipse_is_tiny() {
        let e = DomainSpec::Ellipsoid {
            semi_axes: vec![1.0, 0.7],
        }
        .build()
        .unwrap();
        let k = KernelEvaluator::with_path(e, 2, KernelPath::Chebyshev).unwrap();
        let v = kernel_k(&k, &[0.1, 0.0], &[-0.2, 0.3]).unwrap();
        assert!(v.abs() < 1e-8, "{v}");
    }

    #[test]
    fn superellipse_routes_agree() {
        let cheb = KernelEvaluator::with_path(superellipse(), 2, KernelPath::Chebyshev).unwrap();
        let uni = KernelEvaluator::with_path(superellipse(), 2, KernelPath::Uniform).unwrap();
        let (x0, x1) = ([0.2, 0.0], [-0.3, 0.1]);
        let a = kernel_k(&cheb, &x0, &x1).unwrap();
        let b = kernel_k(&uni, &x0, &x1).unwrap();
        assert!(a.abs() > 1e-4, "{a}");
        assert!((a - b).abs() < 1e-4 * a.abs(), "{a} {b}");
    }

    #[test]
    fn central_symmetry() {
        let k = KernelEvaluator::new(superellipse(), 2).unwrap();
        let a = kernel_k(&k, &[0.3, -0.1], &[-0.2, 0.25]).unwrap();
        let b = kernel_k(&k, &[-0.3, 0.1], &[0.2, -0.25]).unwrap();
        assert!((a - b).abs() < 1e-6 * a.abs(), "{a} {b}");
    }
}

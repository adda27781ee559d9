use std::f64::consts::PI;

use super::{BoundaryQuadrature, DomainSpec};
use crate::error::{invalid, Error, Result};

const CONVEXITY_SAMPLES: usize = 4096;
const DIAMETER_SAMPLES: usize = 1024;

/// Polar radius `rho(theta)` of a star-shaped curve about the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum PolarShape {
    Superellipse {
        a: f64,
        b: f64,
        p: f64,
        smoothing: f64,
    },
    /// Trigonometric interpolant of uniformly spaced samples.
    Fourier {
        theta: Vec<f64>,
        rho: Vec<f64>,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
}

impl PolarShape {
    pub fn superellipse(a: f64, b: f64, p: f64, smoothing: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(invalid("superellipse", "semi-axes must be positive"));
        }
        if !(p >= 1.0) {
            return Err(invalid("superellipse", "exponent p must be at least 1"));
        }
        if !(smoothing >= 0.0) {
            return Err(invalid("superellipse", "smoothing must be non-negative"));
        }
        if p < 2.0 && smoothing == 0.0 {
            return Err(invalid(
                "superellipse",
                "p < 2 has a corner-like curvature blow-up; use smoothing > 0",
            ));
        }
        Ok(PolarShape::Superellipse {
            a,
            b,
            p,
            smoothing,
        })
    }

    /// Trigonometric interpolation of `rho` sampled at `theta_k = theta_0 + 2 pi k / N`.
    pub fn from_samples(theta: &[f64], rho: &[f64]) -> Result<Self> {
        let n = theta.len();
        if n != rho.len() {
            return Err(invalid("polar table", "theta and rho lengths differ"));
        }
        if n < 8 {
            return Err(invalid("polar table", "need at least 8 samples"));
        }
        let step = 2.0 * PI / n as f64;
        for (k, t) in theta.iter().enumerate() {
            if (t - (theta[0] + k as f64 * step)).abs() > 1e-9 {
                return Err(invalid(
                    "polar table",
                    "theta must be uniformly spaced over one period",
                ));
            }
        }
        if rho.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(invalid("polar table", "rho must be positive"));
        }
        let half = n / 2;
        let mut cos = vec![0.0; half + 1];
        let mut sin = vec![0.0; half + 1];
        for k in 0..=half {
            let mut c = 0.0;
            let mut s = 0.0;
            for (t, r) in theta.iter().zip(rho) {
                let (sk, ck) = (k as f64 * t).sin_cos();
                c += r * ck;
                s += r * sk;
            }
            let scale = if k == 0 || (n % 2 == 0 && k == half) {
                1.0 / n as f64
            } else {
                2.0 / n as f64
            };
            cos[k] = c * scale;
            sin[k] = s * scale;
        }
        if n % 2 == 0 {
            // The Nyquist sine term is not resolved by the samples.
            sin[half] = 0.0;
        }
        Ok(PolarShape::Fourier {
            theta: theta.to_vec(),
            rho: rho.to_vec(),
            cos,
            sin,
        })
    }

    pub fn spec(&self) -> DomainSpec {
        match self {
            PolarShape::Superellipse {
                a,
                b,
                p,
                smoothing,
            } => DomainSpec::Superellipse {
                a: *a,
                b: *b,
                p: *p,
                smoothing: *smoothing,
            },
            PolarShape::Fourier { theta, rho, .. } => DomainSpec::PolarTable {
                theta: theta.clone(),
                rho: rho.clone(),
            },
        }
    }

    /// `(rho, rho', rho'')` at `theta`.
    pub fn radius(&self, theta: f64) -> (f64, f64, f64) {
        match self {
            PolarShape::Superellipse {
                a,
                b,
                p,
                smoothing,
            } => superellipse_radius(*a, *b, *p, *smoothing, theta),
            PolarShape::Fourier { cos, sin, .. } => {
                let mut r = cos[0];
                let mut d1 = 0.0;
                let mut d2 = 0.0;
                for k in 1..cos.len() {
                    let kf = k as f64;
                    let (s, c) = (kf * theta).sin_cos();
                    let v = cos[k] * c + sin[k] * s;
                    r += v;
                    d1 += kf * (sin[k] * c - cos[k] * s);
                    d2 -= kf * kf * v;
                }
                (r, d1, d2)
            }
        }
    }
}

fn superellipse_radius(a: f64, b: f64, p: f64, eps: f64, theta: f64) -> (f64, f64, f64) {
    // s(u) = (u^2 + eps^2)^(p/2) - eps^p and its first two derivatives.
    let s = |u: f64| -> (f64, f64, f64) {
        let q = u * u + eps * eps;
        if q == 0.0 {
            let d2 = if p == 2.0 { 2.0 } else { 0.0 };
            return (0.0, 0.0, d2);
        }
        let v = q.powf(0.5 * p) - eps.powf(p);
        let d1 = p * u * q.powf(0.5 * p - 1.0);
        let d2 = p * q.powf(0.5 * p - 1.0) + p * (p - 2.0) * u * u * q.powf(0.5 * p - 2.0);
        (v, d1, d2)
    };
    let (st, ct) = theta.sin_cos();
    let (u1, u1p, u1pp) = (ct / a, -st / a, -ct / a);
    let (u2, u2p, u2pp) = (st / b, ct / b, -st / b);
    let (s1, s1p, s1pp) = s(u1);
    let (s2, s2p, s2pp) = s(u2);
    let q = s1 + s2;
    let qp = s1p * u1p + s2p * u2p;
    let qpp = s1pp * u1p * u1p + s1p * u1pp + s2pp * u2p * u2p + s2p * u2pp;
    let e = -1.0 / p;
    let r = q.powf(e);
    let rp = e * q.powf(e - 1.0) * qp;
    let rpp = e * ((e - 1.0) * q.powf(e - 2.0) * qp * qp + q.powf(e - 1.0) * qpp);
    (r, rp, rpp)
}

/// Support data of a direction: extreme values of `omega . x` over the
/// boundary and the curve parameters where they are attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
}

/// A smooth convex planar domain given by its polar radius about the origin.
#[derive(Debug, Clone)]
pub struct SmoothConvexDomain2D {
    shape: PolarShape,
    diameter: f64,
}

impl SmoothConvexDomain2D {
    pub fn new(shape: PolarShape) -> Result<Self> {
        let mut rmin = f64::INFINITY;
        let mut rmax: f64 = 0.0;
        for k in 0..CONVEXITY_SAMPLES {
            let t = 2.0 * PI * k as f64 / CONVEXITY_SAMPLES as f64;
            let (r, rp, rpp) = shape.radius(t);
            if !r.is_finite() {
                return Err(invalid("polar radius", format!("non-finite at theta = {t}")));
            }
            rmin = rmin.min(r);
            rmax = rmax.max(r);
            // Signed curvature numerator of a polar curve.
            let kappa = r * r + 2.0 * rp * rp - r * rpp;
            if kappa < -1e-10 * r * r {
                return Err(Error::NonConvex(format!(
                    "curvature changes sign near theta = {t:.6}"
                )));
            }
        }
        if !(rmin > 1e-6 * rmax) {
            return Err(invalid("polar radius", "radius must stay away from zero"));
        }
        let mut domain = Self {
            shape,
            diameter: 0.0,
        };
        let pts: Vec<[f64; 2]> = (0..DIAMETER_SAMPLES)
            .map(|k| domain.point(2.0 * PI * k as f64 / DIAMETER_SAMPLES as f64))
            .collect();
        let mut diam: f64 = 0.0;
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                diam = diam.max(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
            }
        }
        domain.diameter = diam;
        Ok(domain)
    }

    pub fn shape(&self) -> &PolarShape {
        &self.shape
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn point(&self, theta: f64) -> [f64; 2] {
        let (r, _, _) = self.shape.radius(theta);
        let (s, c) = theta.sin_cos();
        [r * c, r * s]
    }

    /// `(gamma, gamma', gamma'')` of the boundary curve at parameter `theta`.
    pub fn curve(&self, theta: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let (r, rp, rpp) = self.shape.radius(theta);
        let (s, c) = theta.sin_cos();
        (
            [r * c, r * s],
            [rp * c - r * s, rp * s + r * c],
            [
                rpp * c - 2.0 * rp * s - r * c,
                rpp * s + 2.0 * rp * c - r * s,
            ],
        )
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return true;
        }
        let theta = x[1].atan2(x[0]);
        r < self.shape.radius(theta).0
    }

    /// Uniform-parameter trapezoid rule with the arc-length Jacobian.
    pub fn boundary_quadrature(&self, resolution: usize) -> BoundaryQuadrature {
        let h = 2.0 * PI / resolution as f64;
        let mut points = Vec::with_capacity(resolution);
        let mut normals = Vec::with_capacity(resolution);
        let mut weights = Vec::with_capacity(resolution);
        for k in 0..resolution {
            let (g, gp, _) = self.curve(k as f64 * h);
            let speed = gp[0].hypot(gp[1]);
            points.push(g.to_vec());
            normals.push(vec![gp[1] / speed, -gp[0] / speed]);
            weights.push(speed * h);
        }
        BoundaryQuadrature::new(points, normals, weights)
    }

    /// Extremes of `omega . x` over the boundary, refined by Newton's method
    /// on the stationarity condition `omega . gamma'(theta) = 0`.
    pub fn support(&self, omega: &[f64]) -> Support {
        const COARSE: usize = 256;
        let value = |t: f64| {
            let p = self.point(t);
            omega[0] * p[0] + omega[1] * p[1]
        };
        let (mut tlo, mut thi) = (0.0, 0.0);
        let (mut vlo, mut vhi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..COARSE {
            let t = 2.0 * PI * k as f64 / COARSE as f64;
            let v = value(t);
            if v < vlo {
                vlo = v;
                tlo = t;
            }
            if v > vhi {
                vhi = v;
                thi = t;
            }
        }
        let refine = |mut t: f64| {
            let bracket = 2.0 * PI / COARSE as f64;
            let t0 = t;
            for _ in 0..50 {
                let (_, gp, gpp) = self.curve(t);
                let d1 = omega[0] * gp[0] + omega[1] * gp[1];
                let d2 = omega[0] * gpp[0] + omega[1] * gpp[1];
                if d2 == 0.0 {
                    break;
                }
                let step = d1 / d2;
                t -= step;
                if (t - t0).abs() > 2.0 * bracket {
                    return t0;
                }
                if step.abs() < 1e-15 {
                    break;
                }
            }
            t
        };
        let tlo = refine(tlo);
        let thi = refine(thi);
        Support {
            lo: value(tlo).min(vlo),
            hi: value(thi).max(vhi),
            theta_lo: tlo,
            theta_hi: thi,
        }
    }

    /// Length of the chord `{omega . x = s}`; zero outside the support.
    pub fn chord_length(&self, omega: &[f64], s: f64, support: &Support) -> f64 {
        if s <= support.lo || s >= support.hi {
            return 0.0;
        }
        let value = |t: f64| {
            let p = self.point(t);
            omega[0] * p[0] + omega[1] * p[1] - s
        };
        let slope = |t: f64| {
            let (_, gp, _) = self.curve(t);
            omega[0] * gp[0] + omega[1] * gp[1]
        };
        // omega . gamma increases from theta_lo to theta_hi along one arc and
        // decreases along the other.
        let mut up_end = support.theta_hi;
        while up_end <= support.theta_lo {
            up_end += 2.0 * PI;
        }
        let mut down_end = support.theta_lo;
        while down_end <= support.theta_hi {
            down_end += 2.0 * PI;
        }
        let t1 = bracketed_root(&value, &slope, support.theta_lo, up_end);
        let t2 = bracketed_root(&value, &slope, support.theta_hi, down_end);
        let p1 = self.point(t1);
        let p2 = self.point(t2);
        (p1[0] - p2[0]).hypot(p1[1] - p2[1])
    }

    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        const COARSE: usize = 1024;
        let dist2 = |t: f64| {
            let p = self.point(t);
            (p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2)
        };
        let mut best = (0.0, f64::INFINITY);
        for k in 0..COARSE {
            let t = 2.0 * PI * k as f64 / COARSE as f64;
            let d = dist2(t);
            if d < best.1 {
                best = (t, d);
            }
        }
        let mut t = best.0;
        for _ in 0..30 {
            let (g, gp, gpp) = self.curve(t);
            let dx = [g[0] - x[0], g[1] - x[1]];
            let d1 = dx[0] * gp[0] + dx[1] * gp[1];
            let d2 = gp[0] * gp[0] + gp[1] * gp[1] + dx[0] * gpp[0] + dx[1] * gpp[1];
            if d2 <= 0.0 {
                break;
            }
            let step = d1 / d2;
            t -= step;
            if step.abs() < 1e-14 {
                break;
            }
        }
        dist2(t).min(best.1).sqrt()
    }
}

/// Root of a monotone function on `[a, b]` where `f(a)` and `f(b)` have
/// opposite signs; Newton steps with bisection safeguard.
fn bracketed_root(f: &impl Fn(f64) -> f64, df: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (a, b);
    let flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    let rising = flo < 0.0;
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let v = f(t);
        if v == 0.0 {
            return t;
        }
        if (v < 0.0) == rising {
            lo = t;
        } else {
            hi = t;
        }
        let d = df(t);
        let newton = t - v / d;
        let next = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - t).abs() < 1e-15 * (1.0 + t.abs()) || hi - lo < 1e-15 {
            return next;
        }
        t = next;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ellipse(a: f64, b: f64) -> SmoothConvexDomain2D {
        SmoothConvexDomain2D::new(PolarShape::superellipse(a, b, 2.0, 0.0).unwrap()).unwrap()
    }

    #[test]
    fn polar_ellipse_chords_match_closed_form() {
        let d = ellipse(2.0, 1.0);
        let omega = [1.0, 0.0];
        let sup = d.support(&omega);
        assert!((sup.hi - 2.0).abs() < 1e-12 && (sup.lo + 2.0).abs() < 1e-12);
        let len = d.chord_length(&omega, 1.0, &sup);
        assert!((len - 2.0 * (0.75f64).sqrt()).abs() < 1e-12, "{len}");
        let omega = [0.6, 0.8];
        let sup = d.support(&omega);
        let h = ((0.6 * 2.0f64).powi(2) + 0.8f64.powi(2)).sqrt();
        assert!((sup.hi - h).abs() < 1e-12);
        for s in [-0.9, 0.0, 0.3, 1.2] {
            let exact = 2.0 * 2.0 / h * (1.0 - (s / h) * (s / h)).sqrt();
            assert!((d.chord_length(&omega, s, &sup) - exact).abs() < 1e-11);
        }
    }

    #[test]
    fn rejects_non_convex_shapes() {
        let theta: Vec<f64> = (0..64).map(|k| 2.0 * PI * k as f64 / 64.0).collect();
        let rho: Vec<f64> = theta.iter().map(|t| 1.0 + 0.3 * (5.0 * t).cos()).collect();
        let shape = PolarShape::from_samples(&theta, &rho).unwrap();
        assert!(matches!(
            SmoothConvexDomain2D::new(shape),
            Err(Error::NonConvex(_))
        ));
    }

    #[test]
    fn fourier_table_reproduces_samples() {
        let theta: Vec<f64> = (0..32).map(|k| 2.0 * PI * k as f64 / 32.0).collect();
        let rho: Vec<f64> = theta.iter().map(|t| 1.0 + 0.05 * (2.0 * t).cos() + 0.02 * t.sin()).collect();
        let shape = PolarShape::from_samples(&theta, &rho).unwrap();
        for (t, r) in theta.iter().zip(&rho) {
            assert!((shape.radius(*t).0 - r).abs() < 1e-13);
        }
        let (_, d1, d2) = shape.radius(0.4);
        assert!((d1 - (-0.1 * (0.8f64).sin() + 0.02 * (0.4f64).cos())).abs() < 1e-12);
        assert!((d2 - (-0.2 * (0.8f64).cos() - 0.02 * (0.4f64).sin())).abs() < 1e-12);
    }

    #[test]
    fn superellipse_derivatives_match_finite_differences() {
        let shape = PolarShape::superellipse(1.0, 0.8, 3.0, 0.1).unwrap();
        let h = 1e-5;
        for t in [0.0, 0.3, 1.2, 1.57, 2.5, 4.0] {
            let (_, d1, d2) = shape.radius(t);
            let fd1 = (shape.radius(t + h).0 - shape.radius(t - h).0) / (2.0 * h);
            let fd2 = (shape.radius(t + h).1 - shape.radius(t - h).1) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-8, "{t}: {d1} {fd1}");
            assert!((d2 - fd2).abs() < 1e-6, "{t}: {d2} {fd2}");
        }
    }
}

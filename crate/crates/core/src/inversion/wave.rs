use std::f64::consts::PI;

use rayon::prelude::*;

use super::{backproject, check_grid, ReconstructionGrid, Variant};
use crate::error::{invalid, Error, Result};
use crate::forward::WaveData;
use crate::geometry::{distance, Domain};
use crate::transforms::{cubic_interpolate, ddr_stack, derivative, GridSpec, ProfileGrid, Symmetry};

/// Back-projected field with the estimated relative size of the neglected
/// time tail (zero in odd dimension, where the data have compact support).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveReconstruction {
    pub field: ReconstructionGrid,
    pub tail_estimate: f64,
}

/// Universal back-projection of wave data. The result equals `f - K f`.
///
/// Odd `n`: with `G = D_t^((n-3)/2) t^-1 p`, variant (a) is
/// `(2 pi^((n-1)/2))^-1 div sum nu G(d)` and variant (b) uses
/// `nu . (x0 - x) G'(d) / d`. Even `n`: with `q = D_t^((n-2)/2) t^-1 p` the
/// radial factor is `A(d) = int_d^T h(t) / sqrt(t^2 - d^2) dt` with
/// `h = t q` (a) or `h = q'` (b), constant `(-1)^((n-2)/2) / pi^(n/2)`.
/// The Abel integral is tabulated per boundary node on the time grid by
/// product integration with `h` piecewise linear, then interpolated.
pub fn universal_backprojection_wave(
    wave: &WaveData,
    domain: &Domain,
    grid: &ReconstructionGrid,
    n: usize,
    variant: Variant,
) -> Result<WaveReconstruction> {
    if wave.dim() != n || domain.dim() != n {
        return Err(Error::Mismatch(format!(
            "wave data are {}-dimensional, domain {}, requested n = {n}",
            wave.dim(),
            domain.dim()
        )));
    }
    if wave.meta.domain != domain.spec() {
        return Err(Error::Mismatch("data were generated on a different domain".into()));
    }
    check_grid(domain, grid)?;
    let times = wave.grid();
    if !times.starts_at_zero() {
        return Err(invalid("times", "time grid must start at t = 0"));
    }
    if times.last() < domain.diameter() {
        return Err(Error::InsufficientGrid(format!(
            "time grid ends at {} before the domain diameter {}",
            times.last(),
            domain.diameter()
        )));
    }
    let scaled: Vec<ProfileGrid> = (0..wave.values.len())
        .map(|i| {
            let row = wave.row(i);
            let samples = row
                .samples()
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let t = times.coord(j);
                    if t > 0.0 { v / t } else { 0.0 }
                })
                .collect();
            ProfileGrid::from_grid(times, samples)
        })
        .collect::<Result<_>>()?;

    if n % 2 == 1 {
        let c = 1.0 / (2.0 * PI.powf(0.5 * (n as f64 - 1.0)));
        let rows = scaled
            .iter()
            .map(|s| {
                let g = ddr_stack(s, (n - 3) / 2)?;
                match variant {
                    Variant::A => Ok(g),
                    Variant::B => derivative(&g, 1, Symmetry::None),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let field = backproject(grid, domain, &wave.boundary, c, variant, |i, d| {
            let v = rows[i].interpolate(d).ok_or_else(|| out_of_range(d))?;
            Ok(if variant == Variant::B { v / d } else { v })
        })?;
        return Ok(WaveReconstruction {
            field,
            tail_estimate: 0.0,
        });
    }

    let sign = if ((n - 2) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let c = sign / PI.powf(0.5 * n as f64);
    let active = grid.active();
    // Divergence stencils reach a little beyond the lattice points.
    let reach = 2.0 * grid.spacing.iter().fold(0.0f64, |m, h| m.max(*h));
    let tables = scaled
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let q = ddr_stack(s, (n - 2) / 2)?;
            let h: Vec<f64> = match variant {
                Variant::A => q
                    .samples()
                    .iter()
                    .enumerate()
                    .map(|(j, v)| times.coord(j) * v)
                    .collect(),
                Variant::B => derivative(&q, 1, Symmetry::None)?.into_samples(),
            };
            let x = &wave.boundary.points[i];
            let (d_lo, d_hi) = active.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &p| {
                let d = distance(x, &grid.point(p));
                (lo.min(d), hi.max(d))
            });
            AbelTable::new(&h, times, (d_lo - reach).max(0.0), d_hi + reach, n)
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = tables.iter().map(|t| t.peak).fold(0.0, f64::max);
    let tail = tables.iter().map(|t| t.tail).fold(0.0, f64::max);
    let field = backproject(grid, domain, &wave.boundary, c, variant, |i, d| tables[i].eval(d))?;
    Ok(WaveReconstruction {
        field,
        tail_estimate: if scale > 0.0 { tail / scale } else { 0.0 },
    })
}

fn out_of_range(d: f64) -> Error {
    Error::InsufficientGrid(format!("distance {d} lies outside the time grid"))
}

/// `A(d) = int_d^T h(t) / sqrt(t^2 - d^2) dt`, tabulated on the time nodes
/// covering `[d_lo, d_hi]` and computed directly below the first node.
struct AbelTable {
    times: GridSpec,
    h: Vec<f64>,
    slope: Vec<f64>,
    start: f64,
    values: Vec<f64>,
    peak: f64,
    tail: f64,
}

impl AbelTable {
    fn new(h: &[f64], times: GridSpec, d_lo: f64, d_hi: f64, n: usize) -> Result<Self> {
        let len = h.len();
        let step = times.step;
        let slope: Vec<f64> = (0..len - 1).map(|k| (h[k + 1] - h[k]) / step).collect();
        let mut table = Self {
            times,
            h: h.to_vec(),
            slope,
            start: 0.0,
            values: Vec::new(),
            peak: 0.0,
            tail: 0.0,
        };
        if !d_lo.is_finite() {
            return Ok(table);
        }
        let j_lo = ((d_lo / step).floor() as usize).saturating_sub(2).max(1);
        let j_hi = ((d_hi / step).ceil() as usize + 2).min(len - 2);
        if j_hi < j_lo + 4 {
            return Err(out_of_range(d_hi));
        }
        table.values = (j_lo..=j_hi).map(|j| table.direct(times.coord(j))).collect();
        table.start = times.coord(j_lo);
        table.peak = table.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        table.tail = tail_estimate(h, times, n);
        Ok(table)
    }

    /// Product integration with `h` linear on every time interval, using
    /// the antiderivatives `ln(t + sqrt(t^2 - d^2))` and `sqrt(t^2 - d^2)`.
    fn direct(&self, d: f64) -> f64 {
        let times = self.times;
        let len = self.h.len();
        let d2 = d * d;
        let first = ((d - times.start) / times.step).floor().max(0.0) as usize;
        let (mut l_prev, mut s_prev) = (d.ln(), 0.0);
        let mut sum = 0.0;
        for k in first..len - 1 {
            let t = times.coord(k + 1);
            if t <= d {
                continue;
            }
            let s = (t * t - d2).sqrt();
            let l = (t + s).ln();
            let alpha = self.h[k] - self.slope[k] * times.coord(k);
            sum += alpha * (l - l_prev) + self.slope[k] * (s - s_prev);
            l_prev = l;
            s_prev = s;
        }
        sum
    }

    fn eval(&self, d: f64) -> Result<f64> {
        if self.values.is_empty() {
            return Ok(0.0);
        }
        if d > 0.0 && d < self.start + self.times.step {
            return Ok(self.direct(d));
        }
        cubic_interpolate(&self.values, self.start, self.times.step, d).ok_or_else(|| out_of_range(d))
    }
}

/// `int_T^inf h(t) / t dt` for a power-law tail `h ~ c t^-a`, which is
/// `h(T) / a`; the exponent is measured between `T / 2` and `T`, falling
/// back to `n` when the tail is not monotone.
fn tail_estimate(h: &[f64], times: GridSpec, n: usize) -> f64 {
    let last = h.len() - 1;
    let (end, mid) = (h[last], h[last / 2]);
    let ratio = mid / end;
    let exponent = if end != 0.0 && ratio > 1.0 && ratio.is_finite() {
        ratio.log2() / (times.last() / times.coord(last / 2)).log2()
    } else {
        n as f64
    };
    end.abs() / exponent
}

//! One-dimensional analysis on uniform grids: Radon profiles of domain
//! indicators, s-derivatives, Hilbert transforms, `(2r)^-1 d/dr` stacks and
//! principal-value integrals.

mod chebyshev;
mod derivative;
mod hilbert;
mod pv;
mod radon;
pub(crate) mod stencil;

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use chebyshev::{ChebyshevSeries, SqrtChebyshev};
pub use derivative::{d_s_derivative, ddr_stack, derivative, Symmetry};
pub use hilbert::{hilbert_identity_check, hilbert_transform, hilbert_transform_with, HilbertKernel};
pub use pv::{pv_integral, RadialPv};
pub use radon::{radon_indicator, radon_indicator_numeric, radon_indicator_profile};

/// Uniform grid `start + j * step`, `j = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl GridSpec {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(invalid("step", "must be positive and finite"));
        }
        if !start.is_finite() {
            return Err(invalid("start", "must be finite"));
        }
        if len < 8 {
            return Err(invalid("len", "grids need at least 8 samples"));
        }
        Ok(Self { start, step, len })
    }

    /// `len` points spanning `[lo, hi]` inclusive.
    pub fn spanning(lo: f64, hi: f64, len: usize) -> Result<Self> {
        if !(hi > lo) {
            return Err(invalid("interval", "upper end must exceed lower end"));
        }
        if len < 8 {
            return Err(invalid("len", "grids need at least 8 samples"));
        }
        Self::new(lo, (hi - lo) / (len - 1) as f64, len)
    }

    pub fn coord(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }

    pub fn last(&self) -> f64 {
        self.coord(self.len - 1)
    }

    pub fn coords(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|j| self.coord(j))
    }

    pub(crate) fn starts_at_zero(&self) -> bool {
        self.start.abs() <= 1e-12 * self.step
    }
}

/// Samples of a scalar function on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileGrid {
    grid: GridSpec,
    samples: Vec<f64>,
}

impl ProfileGrid {
    pub fn new(samples: Vec<f64>, start: f64, step: f64) -> Result<Self> {
        let grid = GridSpec::new(start, step, samples.len())?;
        Ok(Self { grid, samples })
    }

    pub fn from_grid(grid: GridSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len {
            return Err(Error::DimensionMismatch {
                expected: grid.len,
                got: samples.len(),
            });
        }
        Ok(Self { grid, samples })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let samples = grid.coords().map(f).collect();
        Self { grid, samples }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.grid.start
    }

    pub fn step(&self) -> f64 {
        self.grid.step
    }

    pub fn coord(&self, j: usize) -> f64 {
        self.grid.coord(j)
    }

    pub fn last(&self) -> f64 {
        self.grid.last()
    }

    /// Cubic (four-point Lagrange) interpolation; `None` outside the grid.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        cubic_interpolate(&self.samples, self.grid.start, self.grid.step, x)
    }

    /// Two-column CSV `coordinate,value` with a header row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "coordinate,value")?;
        for (j, v) in self.samples.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e}", self.coord(j), v)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut coords = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            if lineno == 0 || line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let mut next = || -> Result<f64> {
                parts
                    .next()
                    .ok_or_else(|| Error::Parse(format!("line {}: missing column", lineno + 1)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            coords.push(next()?);
            values.push(next()?);
        }
        if coords.len() < 8 {
            return Err(Error::Parse("profile needs at least 8 rows".into()));
        }
        let step = (coords[coords.len() - 1] - coords[0]) / (coords.len() - 1) as f64;
        for (j, c) in coords.iter().enumerate() {
            if (c - (coords[0] + j as f64 * step)).abs() > 1e-9 * step.abs().max(1.0) {
                return Err(Error::Parse("coordinates are not uniformly spaced".into()));
            }
        }
        Self::new(values, coords[0], step)
    }
}

/// Four-point Lagrange interpolation on a uniform grid, falling back to
/// shifted stencils at the ends. Returns `None` outside `[start, last]`.
pub(crate) fn cubic_interpolate(samples: &[f64], start: f64, step: f64, x: f64) -> Option<f64> {
    let n = samples.len();
    let u = (x - start) / step;
    if !(u >= -1e-9 && u <= (n - 1) as f64 + 1e-9) || n < 4 {
        return None;
    }
    let i = (u.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let t = u - i as f64;
    let (t0, t1, t2, t3) = (t, t - 1.0, t - 2.0, t - 3.0);
    let w0 = -t1 * t2 * t3 / 6.0;
    let w1 = t0 * t2 * t3 / 2.0;
    let w2 = -t0 * t1 * t3 / 2.0;
    let w3 = t0 * t1 * t2 / 6.0;
    Some(w0 * samples[i] + w1 * samples[i + 1] + w2 * samples[i + 2] + w3 * samples[i + 3])
}

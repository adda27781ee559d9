use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::Domain;

/// Scalar field on a rectangular lattice, meaningful where `mask` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionGrid {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

/// Linear grey-level scaling of a PGM image, written next to it as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PgmScaling {
    pub width: usize,
    pub height: usize,
    /// Index along the third axis for slices of 3-D fields.
    pub slice: Option<usize>,
    /// Field value mapped to grey level 0.
    pub min: f64,
    /// Field value mapped to grey level 255.
    pub max: f64,
}

impl ReconstructionGrid {
    /// Lattice with every point masked in and zero values.
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        if origin.len() != spacing.len() || origin.len() != shape.len() || origin.is_empty() {
            return Err(invalid("grid", "origin, spacing and shape need one entry per axis"));
        }
        if spacing.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(invalid("spacing", "must be positive on every axis"));
        }
        if shape.contains(&0) {
            return Err(invalid("shape", "every axis needs at least one point"));
        }
        let len = shape.iter().product();
        Ok(Self {
            origin,
            spacing,
            shape,
            values: vec![0.0; len],
            mask: vec![true; len],
        })
    }

    /// Cell-centred lattice with `per_axis` points per axis over the
    /// bounding box of `domain`, masked to its interior.
    pub fn covering(domain: &Domain, per_axis: usize) -> Result<Self> {
        if per_axis < 2 {
            return Err(invalid("per_axis", "need at least 2 points per axis"));
        }
        let half = domain.bounding_half_widths();
        let spacing: Vec<f64> = half.iter().map(|w| 2.0 * w / per_axis as f64).collect();
        let origin: Vec<f64> = half.iter().zip(&spacing).map(|(w, h)| -w + 0.5 * h).collect();
        let mut grid = Self::new(origin, spacing, vec![per_axis; half.len()])?;
        grid.restrict_to(domain)?;
        Ok(grid)
    }

    /// Clears the mask outside the open domain.
    pub fn restrict_to(&mut self, domain: &Domain) -> Result<()> {
        for i in 0..self.len() {
            if self.mask[i] {
                self.mask[i] = domain.contains(&self.point(i))?;
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Per-axis indices of flat index `i` (first axis fastest).
    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        self.shape
            .iter()
            .map(|&m| {
                let k = i % m;
                i /= m;
                k
            })
            .collect()
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .rev()
            .fold(0, |acc, (k, m)| acc * m + k)
    }

    /// Flat index of the neighbour `offset` steps along `axis`, if it exists.
    pub fn neighbour(&self, i: usize, axis: usize, offset: isize) -> Option<usize> {
        let mut idx = self.multi_index(i);
        let k = idx[axis] as isize + offset;
        if k < 0 || k >= self.shape[axis] as isize {
            return None;
        }
        idx[axis] = k as usize;
        Some(self.flat_index(&idx))
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        self.multi_index(i)
            .iter()
            .zip(self.origin.iter().zip(&self.spacing))
            .map(|(&k, (o, h))| o + k as f64 * h)
            .collect()
    }

    /// Indices of masked points.
    pub fn active(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.mask[i]).collect()
    }

    /// Masked points whose neighbours up to two steps along every axis are
    /// masked as well.
    pub fn margin_mask(&self) -> Vec<bool> {
        (0..self.len())
            .map(|i| {
                self.mask[i]
                    && (0..self.dim()).all(|axis| {
                        [-2, -1, 1, 2].iter().all(|&o| {
                            self.neighbour(i, axis, o).is_some_and(|j| self.mask[j])
                        })
                    })
            })
            .collect()
    }

    /// Same lattice and mask with values `f(x)` on masked points.
    pub fn sampled(&self, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.len() {
            out.values[i] = if self.mask[i] { f(&self.point(i)) } else { 0.0 };
        }
        out
    }

    pub fn same_lattice(&self, other: &Self) -> bool {
        self.origin == other.origin
            && self.spacing == other.spacing
            && self.shape == other.shape
            && self.mask == other.mask
    }

    /// One row per lattice point: coordinates, mask flag and value.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        let mut header: Vec<String> = (0..self.dim()).map(|k| format!("x{k}")).collect();
        header.push("inside".into());
        header.push("value".into());
        writeln!(out, "{}", header.join(","))?;
        for i in 0..self.len() {
            for c in self.point(i) {
                write!(out, "{c:.16e},")?;
            }
            writeln!(out, "{},{:.16e}", u8::from(self.mask[i]), self.values[i])?;
        }
        out.flush()?;
        Ok(())
    }

    /// 8-bit binary PGM of a 2-D field, or of slice `slice` along the third
    /// axis of a 3-D field, scaled linearly between the extreme masked
    /// values; the scaling goes to `<path>.json`.
    pub fn write_pgm(&self, path: &Path, slice: Option<usize>) -> Result<PgmScaling> {
        let (width, height) = match (self.dim(), slice) {
            (2, None) => (self.shape[0], self.shape[1]),
            (3, Some(k)) if k < self.shape[2] => (self.shape[0], self.shape[1]),
            (3, _) => return Err(invalid("slice", "3-D fields need a slice index in range")),
            _ => return Err(Error::Unsupported("PGM output needs a 2-D field or 3-D slice".into())),
        };
        let base = slice.unwrap_or(0) * width * height;
        let cells: Vec<usize> = (0..width * height).map(|c| base + c).collect();
        let (min, max) = cells
            .iter()
            .filter(|&&i| self.mask[i])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                (lo.min(self.values[i]), hi.max(self.values[i]))
            });
        let (min, max) = if min.is_finite() { (min, max) } else { (0.0, 0.0) };
        let range = if max > min { max - min } else { 1.0 };
        let mut out = BufWriter::new(File::create(path)?);
        write!(out, "P5\n{width} {height}\n255\n")?;
        // Image rows run from the top, i.e. from the largest second index.
        for row in (0..height).rev() {
            let bytes: Vec<u8> = (0..width)
                .map(|col| {
                    let i = base + row * width + col;
                    if self.mask[i] {
                        (255.0 * (self.values[i] - min) / range).round().clamp(0.0, 255.0) as u8
                    } else {
                        0
                    }
                })
                .collect();
            out.write_all(&bytes)?;
        }
        out.flush()?;
        let scaling = PgmScaling {
            width,
            height,
            slice,
            min,
            max,
        };
        let mut side = path.as_os_str().to_owned();
        side.push(".json");
        let mut f = BufWriter::new(File::create(Path::new(&side))?);
        serde_json::to_writer_pretty(&mut f, &scaling)?;
        writeln!(f)?;
        f.flush()?;
        Ok(scaling)
    }
}

/// Masked error norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// `|recon - truth|_2 / |truth|_2` (the plain norm of the difference
    /// when the truth vanishes).
    pub relative_l2: f64,
    pub max_abs: f64,
}

/// Error norms over masked points at least two lattice steps inside the
/// mask.
pub fn reconstruction_error(truth: &ReconstructionGrid, recon: &ReconstructionGrid) -> Result<ErrorReport> {
    if !truth.same_lattice(recon) {
        return Err(Error::Mismatch("reconstruction grids differ".into()));
    }
    let keep = truth.margin_mask();
    let (mut diff, mut norm, mut max_abs) = (0.0, 0.0, 0.0f64);
    for i in (0..truth.len()).filter(|&i| keep[i]) {
        let e = recon.values[i] - truth.values[i];
        diff += e * e;
        norm += truth.values[i] * truth.values[i];
        max_abs = max_abs.max(e.abs());
    }
    let relative_l2 = if norm > 0.0 { (diff / norm).sqrt() } else { diff.sqrt() };
    Ok(ErrorReport {
        relative_l2,
        max_abs,
    })
}

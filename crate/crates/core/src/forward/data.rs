use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Phantom;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryQuadrature, DomainSpec};
use crate::transforms::{GridSpec, ProfileGrid};

pub const METADATA_FILE: &str = "metadata.json";
pub const VALUES_FILE: &str = "values.csv";
pub const BOUNDARY_FILE: &str = "boundary.csv";

/// How the stored means are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Sphere integral divided by the area of the unit sphere.
    UnitSphereAverage,
    /// Plain sphere integral (not accepted by the solvers).
    SurfaceIntegral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    SphericalMeans,
    Wave,
}

/// Everything about a data set except the sample values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMetadata {
    pub kind: DataKind,
    pub dim: usize,
    pub domain: DomainSpec,
    #[serde(default)]
    pub phantom: Option<Phantom>,
    /// Radius grid for means, time grid for wave data.
    pub grid: GridSpec,
    pub boundary_resolution: usize,
    pub boundary_nodes: usize,
    pub normalization: Normalization,
}

/// Samples `M f(x_i, r_j)` on boundary nodes `x_i` and radii `r_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalMeanData {
    pub meta: DataMetadata,
    pub boundary: BoundaryQuadrature,
    pub values: Vec<Vec<f64>>,
}

/// Samples `p(x_i, t_j)` of the wave field on boundary nodes and times.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveData {
    pub meta: DataMetadata,
    pub boundary: BoundaryQuadrature,
    pub values: Vec<Vec<f64>>,
}

macro_rules! dataset_impl {
    ($ty:ty, $kind:expr) => {
        impl $ty {
            pub fn grid(&self) -> GridSpec {
                self.meta.grid
            }

            pub fn dim(&self) -> usize {
                self.meta.dim
            }

            /// Row `i` as a profile over the radius or time grid.
            pub fn row(&self, i: usize) -> ProfileGrid {
                ProfileGrid::from_grid(self.meta.grid, self.values[i].clone())
                    .expect("rows match the grid")
            }

            pub fn write_dir(&self, dir: &Path) -> Result<()> {
                write_dataset(dir, &self.meta, &self.boundary, &self.values)
            }

            pub fn read_dir(dir: &Path) -> Result<Self> {
                let (meta, boundary, values) = read_dataset(dir)?;
                if meta.kind != $kind {
                    return Err(Error::Mismatch(format!(
                        "{} holds {:?} data, expected {:?}",
                        dir.display(),
                        meta.kind,
                        $kind
                    )));
                }
                Ok(Self {
                    meta,
                    boundary,
                    values,
                })
            }
        }
    };
}

dataset_impl!(SphericalMeanData, DataKind::SphericalMeans);
dataset_impl!(WaveData, DataKind::Wave);

fn write_dataset(
    dir: &Path,
    meta: &DataMetadata,
    boundary: &BoundaryQuadrature,
    values: &[Vec<f64>],
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut out = BufWriter::new(File::create(dir.join(METADATA_FILE))?);
    serde_json::to_writer_pretty(&mut out, meta)?;
    writeln!(out)?;
    out.flush()?;

    let mut out = BufWriter::new(File::create(dir.join(BOUNDARY_FILE))?);
    let n = meta.dim;
    let header: Vec<String> = (0..n)
        .map(|k| format!("x{k}"))
        .chain((0..n).map(|k| format!("nu{k}")))
        .chain(std::iter::once("weight".to_string()))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for i in 0..boundary.len() {
        let row: Vec<String> = boundary.points[i]
            .iter()
            .chain(&boundary.normals[i])
            .chain(std::iter::once(&boundary.weights[i]))
            .map(|v| format!("{v:.16e}"))
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;

    let mut out = BufWriter::new(File::create(dir.join(VALUES_FILE))?);
    write!(out, "node")?;
    for c in meta.grid.coords() {
        write!(out, ",{c:.16e}")?;
    }
    writeln!(out)?;
    for (i, row) in values.iter().enumerate() {
        write!(out, "{i}")?;
        for v in row {
            write!(out, ",{v:.16e}")?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn parse_row(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))
        })
        .collect()
}

fn read_dataset(dir: &Path) -> Result<(DataMetadata, BoundaryQuadrature, Vec<Vec<f64>>)> {
    let meta: DataMetadata =
        serde_json::from_reader(BufReader::new(File::open(dir.join(METADATA_FILE))?))?;
    let n = meta.dim;

    let mut points = Vec::new();
    let mut normals = Vec::new();
    let mut weights = Vec::new();
    let reader = BufReader::new(File::open(dir.join(BOUNDARY_FILE))?);
    for (lineno, line) in reader.lines().enumerate().skip(1) {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_row(&line, lineno + 1)?;
        if row.len() != 2 * n + 1 {
            return Err(Error::Parse(format!(
                "{BOUNDARY_FILE} line {}: expected {} columns",
                lineno + 1,
                2 * n + 1
            )));
        }
        points.push(row[..n].to_vec());
        normals.push(row[n..2 * n].to_vec());
        weights.push(row[2 * n]);
    }

    let mut values = Vec::new();
    let reader = BufReader::new(File::open(dir.join(VALUES_FILE))?);
    for (lineno, line) in reader.lines().enumerate().skip(1) {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (_, rest) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("{VALUES_FILE} line {}: no values", lineno + 1)))?;
        let row = parse_row(rest, lineno + 1)?;
        if row.len() != meta.grid.len {
            return Err(Error::Parse(format!(
                "{VALUES_FILE} line {}: expected {} values, found {}",
                lineno + 1,
                meta.grid.len,
                row.len()
            )));
        }
        values.push(row);
    }
    if values.len() != points.len() || points.len() != meta.boundary_nodes {
        return Err(Error::Mismatch(format!(
            "{} boundary nodes, {} value rows, metadata says {}",
            points.len(),
            values.len(),
            meta.boundary_nodes
        )));
    }
    Ok((meta, BoundaryQuadrature::new(points, normals, weights), values))
}

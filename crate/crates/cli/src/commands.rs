use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sphmean::forward::{
    forward_data, wave_from_means_even, wave_from_means_odd, DataKind, DataMetadata, SphericalMeanData,
    WaveData, METADATA_FILE,
};
use sphmean::geometry::Domain;
use sphmean::inversion::{
    reconstruct_means, reconstruct_means_at, reconstruction_error, universal_backprojection_wave,
    ReconstructionGrid,
};
use sphmean::kernels::{kernel_k, smoothing_k, KernelEvaluator};
use sphmean::transforms::GridSpec;
use sphmean::Error;

use crate::config::{Pipeline, RunConfig};
use crate::error::{field, CliError};

pub const DATA_DIR: &str = "data";
pub const RECON_CSV: &str = "recon.csv";
pub const RECON_PGM: &str = "recon.pgm";
pub const REPORT_FILE: &str = "report.json";
pub const KERNEL_CSV: &str = "kernel_map.csv";
pub const PHANTOM_CSV: &str = "phantom.csv";
pub const PHANTOM_PGM: &str = "phantom.pgm";

/// Final time of even-dimensional wave data relative to the diameter when
/// the configuration leaves it open.
const DEFAULT_TIME_SPAN: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub relative_l2: f64,
    pub max_abs: f64,
    /// Wall-clock seconds of the reconstruction.
    pub runtime: f64,
    pub active_points: usize,
    /// Relative size of the neglected time tail of even-dimensional wave
    /// data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_estimate: Option<f64>,
    /// Largest `|f - BP - K f|` over the random probes, relative to
    /// `max |f|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identity_residual: Option<f64>,
}

/// Writes the forward data of a means or wave configuration to
/// `out/data` and returns that directory.
pub fn cmd_forward(config: &RunConfig, out: &Path) -> Result<PathBuf, CliError> {
    let domain = config.domain()?;
    let n = config.dim;
    let r = &config.resolution;
    let dir = out.join(DATA_DIR);
    let means = || forward_data(&config.phantom(), &domain, r.boundary, r.radial);
    match config.pipeline {
        Pipeline::Means => means()?.write_dir(&dir)?,
        Pipeline::Wave => {
            let m = means()?;
            let wave = if n % 2 == 1 {
                wave_from_means_odd(&m, n)?
            } else {
                let t = r.time_max.unwrap_or(DEFAULT_TIME_SPAN * domain.diameter());
                wave_from_means_even(&m, n, GridSpec::spanning(0.0, t, r.time)?)?
            };
            wave.write_dir(&dir)?
        }
        Pipeline::KernelMap => {
            return Err(field("pipeline", "the kernel-map pipeline has no forward data"));
        }
    }
    write_text(&out.join("config.toml"), &config.to_toml()?)?;
    Ok(dir)
}

/// Reconstructs from `data_dir`, writes the field, its image and the error
/// report to `out`. The kernel-map pipeline writes the kernel slice
/// instead and returns `None`.
pub fn cmd_reconstruct(config: &RunConfig, data_dir: &Path, out: &Path) -> Result<Option<Report>, CliError> {
    if config.pipeline == Pipeline::KernelMap {
        cmd_kernel_map(config, out)?;
        return Ok(None);
    }
    let domain = config.domain()?;
    let n = config.dim;
    let meta = read_metadata(data_dir)?;
    check_metadata(config, &meta)?;
    let grid = ReconstructionGrid::covering(&domain, config.resolution.grid)?;
    let phantom = config.phantom();
    let start = Instant::now();
    let (recon, tail, identity) = match config.pipeline {
        Pipeline::Means => {
            let data = SphericalMeanData::read_dir(data_dir)?;
            let recon = reconstruct_means(&data, &domain, &grid, n, config.variant)?;
            let identity = if config.probes > 0 && !domain.is_ellipsoid() {
                Some(identity_residual(config, &domain, &data)?)
            } else {
                None
            };
            (recon, None, identity)
        }
        _ => {
            let data = WaveData::read_dir(data_dir)?;
            let w = universal_backprojection_wave(&data, &domain, &grid, n, config.variant)?;
            let tail = (n % 2 == 0).then_some(w.tail_estimate);
            (w.field, tail, None)
        }
    };
    let runtime = start.elapsed().as_secs_f64();
    let truth = grid.sampled(|x| phantom.eval(x));
    let err = reconstruction_error(&truth, &recon)?;
    fs::create_dir_all(out)?;
    write_grid(&recon, &out.join(RECON_CSV), &out.join(RECON_PGM))?;
    let report = Report {
        relative_l2: err.relative_l2,
        max_abs: err.max_abs,
        runtime,
        active_points: recon.active().len(),
        tail_estimate: tail,
        identity_residual: identity,
    };
    let mut f = BufWriter::new(File::create(out.join(REPORT_FILE))?);
    serde_json::to_writer_pretty(&mut f, &report)?;
    writeln!(f)?;
    f.flush()?;
    Ok(Some(report))
}

fn read_metadata(dir: &Path) -> Result<DataMetadata, CliError> {
    let path = dir.join(METADATA_FILE);
    let text = fs::read_to_string(&path)
        .map_err(|e| field("data", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| field("data", format!("{}: {e}", path.display())))
}

fn check_metadata(config: &RunConfig, meta: &DataMetadata) -> Result<(), CliError> {
    let kind = match config.pipeline {
        Pipeline::Wave => DataKind::Wave,
        _ => DataKind::SphericalMeans,
    };
    if meta.kind != kind {
        return Err(field("data", format!("holds {:?}, the pipeline needs {kind:?}", meta.kind)));
    }
    if meta.dim != config.dim {
        return Err(field("data", format!("is {}-dimensional, config dim = {}", meta.dim, config.dim)));
    }
    if meta.domain != config.domain {
        return Err(field("data", "was generated on a different domain than the config's"));
    }
    Ok(())
}

/// `max |f - BP - K f| / max |f|` at `config.probes` seeded interior points.
fn identity_residual(config: &RunConfig, domain: &Domain, data: &SphericalMeanData) -> Result<f64, CliError> {
    let phantom = config.phantom();
    let points = random_interior_points(domain, config.probes, config.seed, 0.9)?;
    let bp = reconstruct_means_at(data, domain, &points, config.dim, config.variant)?;
    let evaluator = KernelEvaluator::new(domain.clone(), config.dim)?;
    let peak = phantom_peak(&phantom);
    let mut worst = 0.0f64;
    for (x, b) in points.iter().zip(&bp) {
        let k = smoothing_k(&evaluator, &phantom, x, config.resolution.volume)?;
        worst = worst.max((phantom.eval(x) - b - k).abs());
    }
    Ok(if peak > 0.0 { worst / peak } else { worst })
}

/// Upper bound of `|f|`: the largest bump amplitude sum at any bump centre.
pub(crate) fn phantom_peak(phantom: &sphmean::forward::Phantom) -> f64 {
    phantom
        .bumps
        .iter()
        .map(|b| phantom.eval(&b.center).abs())
        .fold(0.0, f64::max)
}

/// Uniform points in the domain scaled by `shrink` about the origin,
/// drawn by rejection from the bounding box.
pub fn random_interior_points(domain: &Domain, count: usize, seed: u64, shrink: f64) -> Result<Vec<Vec<f64>>, CliError> {
    let half = domain.bounding_half_widths();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let x: Vec<f64> = half.iter().map(|h| shrink * rng.gen_range(-*h..*h)).collect();
        let inner: Vec<f64> = x.iter().map(|v| v / shrink).collect();
        if domain.contains(&inner)? {
            points.push(x);
        }
    }
    Ok(points)
}

/// Writes `k(x0, x1)` on a lattice over the plane of the first two axes
/// (other coordinates zero) as CSV with columns `x0,x1,inside,value`;
/// points outside the domain, on `x0` or in the tangency exclusion zone get
/// `nan`.
pub fn cmd_kernel_map(config: &RunConfig, out: &Path) -> Result<PathBuf, CliError> {
    let domain = config.domain()?;
    let n = config.dim;
    let x0 = config.kernel_origin.clone().unwrap_or_else(|| vec![0.0; n]);
    if !domain.contains(&x0)? {
        return Err(field("kernel_origin", "must lie inside the domain"));
    }
    let evaluator = KernelEvaluator::new(domain.clone(), n)?;
    let half = domain.bounding_half_widths();
    let g = config.resolution.grid;
    let coord = |axis: usize, j: usize| -half[axis] + (j as f64 + 0.5) * 2.0 * half[axis] / g as f64;
    let rows = (0..g * g)
        .into_par_iter()
        .map(|c| {
            let mut x1 = x0.clone();
            x1.iter_mut().skip(2).for_each(|v| *v = 0.0);
            x1[0] = coord(0, c % g);
            x1[1] = coord(1, c / g);
            let inside = domain.contains(&x1)?;
            let value = if inside {
                match kernel_k(&evaluator, &x0, &x1) {
                    Ok(v) => v,
                    Err(Error::CoincidentPoints | Error::TangencyExclusion { .. }) => f64::NAN,
                    Err(e) => return Err(e),
                }
            } else {
                f64::NAN
            };
            Ok((x1[0], x1[1], inside, value))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    fs::create_dir_all(out)?;
    let path = out.join(KERNEL_CSV);
    let mut f = BufWriter::new(File::create(&path)?);
    writeln!(f, "x0,x1,inside,value")?;
    for (a, b, inside, v) in rows {
        writeln!(f, "{a:.16e},{b:.16e},{},{v:.16e}", u8::from(inside))?;
    }
    f.flush()?;
    Ok(path)
}

/// Samples the phantom on the reconstruction lattice.
pub fn cmd_phantom_render(config: &RunConfig, out: &Path) -> Result<PathBuf, CliError> {
    let domain = config.domain()?;
    let phantom = config.phantom();
    let grid = ReconstructionGrid::covering(&domain, config.resolution.grid)?.sampled(|x| phantom.eval(x));
    fs::create_dir_all(out)?;
    let path = out.join(PHANTOM_CSV);
    write_grid(&grid, &path, &out.join(PHANTOM_PGM))?;
    Ok(path)
}

/// CSV of the whole lattice and, for two and three dimensions, a PGM of the
/// plane or the middle slice.
fn write_grid(grid: &ReconstructionGrid, csv: &Path, pgm: &Path) -> Result<(), CliError> {
    let mut f = BufWriter::new(File::create(csv)?);
    grid.write_csv(&mut f)?;
    f.flush()?;
    match grid.dim() {
        2 => {
            grid.write_pgm(pgm, None)?;
        }
        3 => {
            grid.write_pgm(pgm, Some(grid.shape[2] / 2))?;
        }
        _ => {}
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

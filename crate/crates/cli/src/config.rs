use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sphmean::forward::{Bump, Phantom};
use sphmean::geometry::{Domain, DomainSpec};
use sphmean::inversion::Variant;

use crate::error::{field, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Means,
    Wave,
    KernelMap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Resolution {
    /// Boundary quadrature resolution (nodes per angle).
    pub boundary: usize,
    /// Number of radii of the spherical-mean data.
    pub radial: usize,
    /// Reconstruction lattice points per axis.
    pub grid: usize,
    /// Number of time samples of even-dimensional wave data.
    pub time: usize,
    /// Final time of even-dimensional wave data; four diameters if absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_max: Option<f64>,
    /// Angular resolution of the smoothing-operator quadrature.
    pub volume: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            boundary: 512,
            radial: 2048,
            grid: 64,
            time: 4096,
            time_max: None,
            volume: 128,
        }
    }
}

/// One run of the pipeline, read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub pipeline: Pipeline,
    pub dim: usize,
    #[serde(default)]
    pub variant: Variant,
    /// Seed of the random probe points.
    #[serde(default)]
    pub seed: u64,
    /// Number of random interior points at which the smoothing identity is
    /// checked after a means reconstruction on a non-elliptical domain.
    #[serde(default)]
    pub probes: usize,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// First argument of the kernel map; the origin if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_origin: Option<Vec<f64>>,
    pub domain: DomainSpec,
    #[serde(default)]
    pub resolution: Resolution,
    #[serde(default, rename = "bump")]
    pub bumps: Vec<Bump>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| field("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Parses and validates a configuration.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| field("config", e.message()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| field("config", e))
    }

    pub fn domain(&self) -> Result<Domain, CliError> {
        self.domain.build().map_err(|e| field("domain", e))
    }

    pub fn phantom(&self) -> Phantom {
        Phantom {
            dim: self.dim,
            bumps: self.bumps.clone(),
        }
    }

    /// Checks every field, naming the first offending one.
    pub fn validate(&self) -> Result<(), CliError> {
        let n = self.dim;
        if !(2..=5).contains(&n) {
            return Err(field("dim", format!("must be 2, 3, 4 or 5 (got {n})")));
        }
        let domain = self.domain()?;
        if domain.dim() != n {
            return Err(field(
                "domain",
                format!("is {}-dimensional but dim = {n}", domain.dim()),
            ));
        }
        let r = &self.resolution;
        for (name, value, min) in [
            ("resolution.boundary", r.boundary, 4),
            ("resolution.radial", r.radial, 16),
            ("resolution.grid", r.grid, 2),
            ("resolution.time", r.time, 16),
            ("resolution.volume", r.volume, 4),
        ] {
            if value < min {
                return Err(field(name, format!("must be at least {min} (got {value})")));
            }
        }
        if let Some(t) = r.time_max {
            if !(t >= domain.diameter()) {
                return Err(field(
                    "resolution.time_max",
                    format!("must reach the domain diameter {} (got {t})", domain.diameter()),
                ));
            }
        }
        for (i, b) in self.bumps.iter().enumerate() {
            if b.center.len() != n {
                return Err(field(
                    &format!("bump[{i}].center"),
                    format!("has {} coordinates, expected {n}", b.center.len()),
                ));
            }
            if b.center.iter().any(|c| !c.is_finite()) {
                return Err(field(&format!("bump[{i}].center"), "must be finite"));
            }
            if !(b.radius > 0.0 && b.radius.is_finite()) {
                return Err(field(&format!("bump[{i}].radius"), "must be positive"));
            }
            if !b.amplitude.is_finite() {
                return Err(field(&format!("bump[{i}].amplitude"), "must be finite"));
            }
            if (b.smoothness as usize) < n + 4 {
                return Err(field(
                    &format!("bump[{i}].smoothness"),
                    format!("must be at least n + 4 = {} (got {})", n + 4, b.smoothness),
                ));
            }
        }
        self.phantom().check_inside(&domain).map_err(|e| field("bump", e))?;
        if let Some(x0) = &self.kernel_origin {
            if x0.len() != n {
                return Err(field(
                    "kernel_origin",
                    format!("has {} coordinates, expected {n}", x0.len()),
                ));
            }
            if !domain.contains(x0).map_err(|e| field("kernel_origin", e))? {
                return Err(field("kernel_origin", "must lie inside the domain"));
            }
        }
        Ok(())
    }

    /// Output directory: the command-line value, then the config value,
    /// then `out`.
    pub fn output_dir(&self, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| self.output.clone())
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ELLIPSE: &str = r#"
pipeline = "means"
dim = 2
variant = "b"
seed = 11

[domain]
kind = "ellipsoid"
semi_axes = [1.0, 0.7]

[resolution]
boundary = 128
radial = 512
grid = 24

[[bump]]
center = [0.3, 0.1]
radius = 0.3
smoothness = 6
amplitude = 1.0
"#;

    #[test]
    fn round_trip_is_identity() {
        let a = RunConfig::from_toml(ELLIPSE).unwrap();
        let text = a.to_toml().unwrap();
        let b = RunConfig::from_toml(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.resolution.volume, 128);
        assert_eq!(b.variant, Variant::B);
    }

    #[test]
    fn superellipse_and_kernel_map_round_trip() {
        let text = r#"
pipeline = "kernel-map"
dim = 2
kernel_origin = [0.1, -0.2]

[domain]
kind = "superellipse"
a = 1.0
b = 0.8
p = 3.0
smoothing = 0.1
"#;
        let a = RunConfig::from_toml(text).unwrap();
        assert_eq!(a.pipeline, Pipeline::KernelMap);
        assert_eq!(RunConfig::from_toml(&a.to_toml().unwrap()).unwrap(), a);
    }

    fn message(text: &str) -> String {
        RunConfig::from_toml(text).unwrap_err().to_string()
    }

    #[test]
    fn errors_name_the_field() {
        let m = message(&ELLIPSE.replace("dim = 2", "dim = 6"));
        assert!(m.starts_with("dim:"), "{m}");
        let m = message(&ELLIPSE.replace("smoothness = 6", "smoothness = 5"));
        assert!(m.starts_with("bump[0].smoothness:"), "{m}");
        let m = message(&ELLIPSE.replace("grid = 24", "grid = 0"));
        assert!(m.starts_with("resolution.grid:"), "{m}");
        let m = message(&ELLIPSE.replace("center = [0.3, 0.1]", "center = [0.8, 0.1]"));
        assert!(m.contains("bump support exceeds domain"), "{m}");
        let m = message(&ELLIPSE.replace("variant = \"b\"", "variant = \"c\""));
        assert!(m.starts_with("config:"), "{m}");
        let m = message(&format!("colour = 1\n{ELLIPSE}"));
        assert!(m.contains("colour"), "{m}");
        let m = message(&ELLIPSE.replace("semi_axes = [1.0, 0.7]", "semi_axes = [1.0, 0.7, 0.5]"));
        assert!(m.starts_with("domain:"), "{m}");
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sphmean_cli::commands::{Report, DATA_DIR, KERNEL_CSV, RECON_CSV, RECON_PGM, REPORT_FILE};
use sphmean_cli::config::RunConfig;

const DISK: &str = r#"
pipeline = "means"
dim = 2
threads = 1

[domain]
kind = "ellipsoid"
semi_axes = [1.0, 0.7]

[resolution]
boundary = 128
radial = 512
grid = 24

[[bump]]
center = [0.2, 0.05]
radius = 0.35
smoothness = 6
amplitude = 1.0
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn sphmean(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphmean")).args(args).output().unwrap()
}

fn run(sub: &str, config: &Path, out: &Path) -> Output {
    sphmean(&[sub, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn forward_and_reconstruct_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "disk.toml", DISK);
    let (one, two) = (tmp.path().join("one"), tmp.path().join("two"));
    for out in [&one, &two] {
        let o = run("forward", &config, out);
        assert!(o.status.success(), "{}", stderr(&o));
        let o = run("reconstruct", &config, out);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for file in ["metadata.json", "values.csv", "boundary.csv"] {
        let a = fs::read(one.join(DATA_DIR).join(file)).unwrap();
        assert_eq!(a, fs::read(two.join(DATA_DIR).join(file)).unwrap(), "{file}");
    }
    assert_eq!(fs::read(one.join(RECON_CSV)).unwrap(), fs::read(two.join(RECON_CSV)).unwrap());
    assert!(fs::read(one.join(RECON_PGM)).unwrap().starts_with(b"P5\n24 24\n255\n"));
    let report: Report = serde_json::from_str(&fs::read_to_string(one.join(REPORT_FILE)).unwrap()).unwrap();
    assert!(report.relative_l2 <= 0.02, "{report:?}");
    assert!(report.runtime >= 0.0 && report.active_points > 0);
}

#[test]
fn phantom_outside_the_domain_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "bad.toml", &DISK.replace("[0.2, 0.05]", "[0.8, 0.05]"));
    let o = run("forward", &config, tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bump support exceeds domain"), "{}", stderr(&o));
    let config = write_config(tmp.path(), "dim.toml", &DISK.replace("dim = 2", "dim = 7"));
    let o = run("forward", &config, tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("dim:"), "{}", stderr(&o));
}

#[test]
fn mismatched_domain_fails_before_compute() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "disk.toml", DISK);
    assert!(run("forward", &config, tmp.path()).status.success());
    let other = write_config(tmp.path(), "other.toml", &DISK.replace("[1.0, 0.7]", "[1.0, 0.75]"));
    let o = run("reconstruct", &other, tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("different domain"), "{}", stderr(&o));
    assert!(!tmp.path().join(REPORT_FILE).exists());
}

#[test]
fn kernel_map_on_a_superellipse() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"
pipeline = "kernel-map"
dim = 2
kernel_origin = [0.2, -0.1]

[domain]
kind = "superellipse"
a = 1.0
b = 0.8
p = 3.0
smoothing = 0.1

[resolution]
grid = 12
"#;
    let config = write_config(tmp.path(), "map.toml", text);
    let o = run("reconstruct", &config, tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join(KERNEL_CSV)).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x0,x1,inside,value"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 144);
    let finite: Vec<f64> = rows.iter().filter(|r| r[2] == 1.0 && r[3].is_finite()).map(|r| r[3]).collect();
    assert!(finite.len() > 80);
    assert!(finite.iter().any(|v| *v != 0.0));
    assert!(rows.iter().filter(|r| r[2] == 0.0).all(|r| r[3].is_nan()));
}

#[test]
fn phantom_render_writes_field_and_image() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "disk.toml", DISK);
    let o = run("phantom-render", &config, tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("phantom.csv")).unwrap();
    assert_eq!(csv.lines().count(), 24 * 24 + 1);
    let side = fs::read_to_string(tmp.path().join("phantom.pgm.json")).unwrap();
    assert!(side.contains("\"max\""));
}

#[test]
fn selftest_catches_a_flipped_hilbert_sign() {
    let o = sphmean(&["selftest", "--level", "quick", "--fault", "hilbert-sign"]);
    assert_eq!(o.status.code(), Some(2));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("criterion 1 FAIL"), "{out}");
    assert!(stderr(&o).contains("Hilbert golden error"), "{}", stderr(&o));
}

#[test]
fn shipped_configs_parse_and_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let config = RunConfig::load(&path).unwrap();
        assert_eq!(RunConfig::from_toml(&config.to_toml().unwrap()).unwrap(), config);
        seen += 1;
    }
    assert!(seen >= 4);
}

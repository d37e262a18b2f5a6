//! Configuration parsing and the command-line interface, including the exit
//! code contract (0 ok, 1 config error, 2 hypothesis violated, 3 resource
//! guard).

use hgabor::config::{parse_config, Config, PresetKind};
use hgabor::error::Error;
use std::io::Write;
use std::path::Path;
use std::process::Command;

#[test]
fn defaults_round_trip() {
    let cfg = parse_config("").unwrap();
    let def = Config::default();
    assert_eq!(cfg.delta_u, def.delta_u);
    assert_eq!(cfg.m_bins, def.m_bins);
    assert_eq!(cfg.steps_per_b, def.steps_per_b);
    assert_eq!(cfg.seed, def.seed);
    assert!(cfg.raw.is_empty());
}

#[test]
fn overrides_comments_and_derived_b() {
    let text = "\
# lambda grid
delta_u = 0.05   # fine grid
m_bins = 64
steps_per_b = 8
b = 0.4          # consistency check only
preset = cell-indicator
nz = 16
lz = 3.5
z0 = 0.0, 0.0
seed = 7
";
    let cfg = parse_config(text).unwrap();
    assert_eq!(cfg.delta_u, 0.05);
    assert_eq!(cfg.m_bins, 64);
    assert!((cfg.b() - 0.4).abs() < 1e-15);
    assert_eq!(cfg.preset, PresetKind::CellIndicator);
    assert_eq!(cfg.nz_axes, vec![16, 16]);
    assert_eq!(cfg.lz_axes, vec![3.5, 3.5]);
    assert_eq!(cfg.seed, 7);
    assert_eq!(cfg.raw.get("m_bins").unwrap(), "64");
}

#[test]
fn all_violations_reported_together() {
    let text = "\
delta_u = -1
m_bins = 1
unknown_key = 3
preset = bogus
nz_axes = 7, 8
";
    let err = parse_config(text).unwrap_err();
    let msg = match err {
        Error::Config(m) => m,
        other => panic!("expected config error, got {other:?}"),
    };
    for needle in [
        "delta_u must be positive",
        "m_bins must be >= 2",
        "unknown key",
        "unknown preset",
        "even and >= 2",
    ] {
        assert!(msg.contains(needle), "missing {needle:?} in:\n{msg}");
    }
}

#[test]
fn inconsistent_b_is_rejected() {
    let err = parse_config("delta_u = 0.1\nsteps_per_b = 8\nb = 0.5\n").unwrap_err();
    assert!(matches!(err, Error::Config(m) if m.contains("b = 0.5 violates")));
}

#[test]
fn p_box_must_fit_in_translation_steps() {
    // 2 p_max + 1 members per family must fit one period of P steps.
    let err = parse_config("steps_per_b = 4\np_max = 2\n").unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    assert!(parse_config("steps_per_b = 5\np_max = 2\n").is_ok());
}

#[test]
fn c_j_restricted_to_supported_normalizations() {
    assert!(parse_config("c_j = 0.5\n").is_ok());
    assert!(parse_config("c_j = 1\n").is_ok());
    assert!(parse_config("c_j = 0.3\n").is_err());
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hgabor"))
}

fn write_cfg(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("exp.cfg");
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(text.as_bytes()).unwrap();
    path
}

#[test]
fn cli_selftest_succeeds_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["selftest", "--threads", "2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(json["command"], "selftest");
    assert!(json["selftest"]["checks"].as_array().unwrap().len() >= 10);
}

#[test]
fn cli_bad_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "delta_u = nonsense\n");
    let out = bin()
        .args(["analyze", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a number"));
}

#[test]
fn cli_overlapping_families_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    // Tiny lattice parameter: the modulated copies overlap heavily, so the
    // orthogonality hypothesis fails and classification must be suppressed.
    let cfg = write_cfg(
        dir.path(),
        "m_bins = 8\nsteps_per_b = 4\nnz = 16\nlz = 4\na = 0.05\nl_max = 1\nsigma_u = 0.4\n",
    );
    let out = bin()
        .args(["analyze", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn cli_bessel_budget_guard_exit_three_and_force() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "m_bins = 8\nsteps_per_b = 4\nnz = 8\nlz = 4\nsigma_u = 0.4\n\
         bessel_budget = 10\nbessel_trials = 2\n",
    );
    let out = bin()
        .args(["bessel", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = bin()
        .args(["bessel", "--force", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

use std::path::Path;
use std::process::Command;

use nspsim::cli::{parse_config, RunConfig, CSV_HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nspsim"))
}

const SMALL: &str = "antennas = 4\nsamples = 8\nbase_stations = 3\nsnr_db = [-5.0, 5.0]\npfa = [0.1, 0.001]\n\
                     trials_per_point = 10\ngrid_step_deg = 5.0\n";

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn empty_file_gives_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(&write_config(dir.path(), "")).unwrap();
    assert_eq!(cfg, RunConfig::default());
    assert_eq!((cfg.antennas, cfg.bs_antennas, cfg.carrier_hz, cfg.spacing_wavelengths), (8, 2, 3.55e9, 0.75));
}

#[test]
fn missing_file_is_exit_2() {
    let status = bin().args(["--config", "/nonexistent/run.toml"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn constraint_violation_is_exit_2_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "pfa = [1.5]");
    let out = bin().arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pfa"));
}

#[test]
fn csv_has_one_row_per_curve_snr_and_pfa() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let status = bin().arg("--config").arg(&cfg).arg("--out").arg(&out_dir).status().unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    // orthogonal + 3 per-BS + selected, 2 SNR, 2 P_FA
    assert_eq!(lines.count(), 5 * 2 * 2);
    assert!(out_dir.join("summary.json").exists());
    assert!(!out_dir.join("plot.gp").exists());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let mut csvs = Vec::new();
    for (i, workers) in ["1", "3"].iter().enumerate() {
        let out_dir = dir.path().join(format!("out{i}"));
        let status = bin()
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .args(["--workers", workers, "--seed", "7"])
            .status()
            .unwrap();
        assert!(status.success());
        csvs.push(std::fs::read(out_dir.join("results.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn summary_records_seed_and_version() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    assert!(bin().arg("--config").arg(&cfg).arg("--out").arg(&out_dir).args(["--seed", "1234"]).status().unwrap().success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["master_seed"], 1234);
    assert_eq!(summary["plan"]["master_seed"], 1234);
    assert!(summary["version"].is_string());
    assert!(summary["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(summary["degenerate_trials"].as_array().unwrap().len(), 5);
    assert_eq!(summary["gap_reports"].as_array().unwrap().len(), 2 * 3);
}

#[test]
fn unwritable_output_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let status = bin().arg("--config").arg(&cfg).arg("--out").arg(blocker.join("out")).status().unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn fig4_preset_emits_a_four_panel_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "trials_per_point = 5\nsnr_db = [0.0, 10.0]\ngrid_step_deg = 10.0\n");
    let out_dir = dir.path().join("out");
    let status = bin()
        .args(["--preset", "fig4", "--emit-plot", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let plot = std::fs::read_to_string(out_dir.join("plot.gp")).unwrap();
    assert!(plot.contains("set multiplot layout 2,2"));
    for p in ["1e-1", "1e-3", "1e-5", "1e-7"] {
        assert!(plot.contains(&format!("P_{{FA}} = {p}")), "{p}");
    }
    let csv = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 7 * 2 * 4);
}

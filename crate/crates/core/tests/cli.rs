use std::fs;
use std::process::Command;

use fogsim_core::cli::{self, Axis, Row, SweepOptions, CSV_COLUMNS};
use fogsim_core::config::{PolicySel, ReservationSel};

const MINIMAL: &str = "[scenario]\nseed = 1\napp_count = 70\n";

fn write_config(dir: &std::path::Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("config.toml");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn run_writes_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), MINIMAL);
    let out = dir.path().join("out");
    let rows = cli::run_scenario(&cfg, &out).unwrap();
    assert_eq!(rows.len(), 4);
    let cells: Vec<_> = rows.iter().map(|r| (r.policy.as_str(), r.reservation.as_str())).collect();
    assert_eq!(cells, [("mc", "off"), ("mc", "on"), ("baseline", "off"), ("baseline", "on")]);

    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(csv.lines().count(), 5);
    let json: serde_json::Value = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["reports"].as_array().unwrap().len(), 4);
}

#[test]
fn bad_battery_names_field_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[fleet]\nbattery_pct = [20.0, 120.0]\n");
    let out = dir.path().join("out");
    let err = cli::run_scenario(&cfg, &out).unwrap_err();
    assert!(err.to_string().contains("fleet.battery_pct"), "{err}");
    assert!(!out.exists());
}

#[test]
fn malformed_toml_is_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[scenario\nseed = 1\n");
    let err = cli::run_scenario(&cfg, &dir.path().join("out")).unwrap_err();
    assert!(err.to_string().contains("malformed"), "{err}");
}

fn small_sweep(out: &std::path::Path, axis: Axis) -> SweepOptions {
    let mut o = SweepOptions::new(axis, out);
    o.seeds = 2;
    o.workers = 2;
    o.policy = PolicySel::Both;
    o.reservation = ReservationSel::Off;
    o
}

#[test]
fn sweep_is_resumable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[scenario]\napp_count = 5\n");
    let out = dir.path().join("out");
    let opts = small_sweep(&out, Axis::DeadlineVariation);
    let first = cli::sweep(&cfg, &opts).unwrap();
    assert_eq!(first.rows.len(), 8 * 2 * 2);
    assert_eq!(first.means.len(), 8 * 2);
    assert!(first.means.iter().all(|r| r.seed == "mean"));

    let cells: Vec<_> = fs::read_dir(out.join("cells")).unwrap().collect();
    assert_eq!(cells.len(), 16);

    // a cached cell is reused as-is
    let cached = out.join("cells").join("deadline_variation-10-seed1.json");
    let mut rows: Vec<Row> = serde_json::from_slice(&fs::read(&cached).unwrap()).unwrap();
    rows[0].avg_delay_s = 12345.0;
    fs::write(&cached, serde_json::to_vec(&rows).unwrap()).unwrap();
    let second = cli::sweep(&cfg, &opts).unwrap();
    assert!(second.rows.iter().any(|r| r.avg_delay_s == 12345.0));

    // and a fresh directory reproduces the first result
    let again = cli::sweep(&cfg, &small_sweep(&dir.path().join("again"), Axis::DeadlineVariation)).unwrap();
    assert_eq!(again, first);
}

#[test]
fn sweep_order_does_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[scenario]\napp_count = 3\n");
    let mut one = small_sweep(&dir.path().join("one"), Axis::Fluctuation);
    one.workers = 1;
    let mut four = small_sweep(&dir.path().join("four"), Axis::Fluctuation);
    four.workers = 4;
    let a = cli::sweep(&cfg, &one).unwrap();
    let b = cli::sweep(&cfg, &four).unwrap();
    assert_eq!(a, b);
    let labels: Vec<_> = a.means.iter().map(|r| r.axis_value.as_str()).step_by(2).collect();
    assert_eq!(labels, ["AF1", "AF2", "AF3", "AF4", "AF5", "AF6", "AF7", "AF8", "AF9"]);
}

#[test]
fn binary_run_uses_env_out_dir_and_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), MINIMAL);
    let bytes = |sub: &str| {
        let out = dir.path().join(sub);
        let status = Command::new(env!("CARGO_BIN_EXE_fogsim"))
            .arg("run")
            .arg(&cfg)
            .env(cli::OUT_DIR_ENV, &out)
            .status()
            .unwrap();
        assert!(status.success());
        fs::read(out.join("report.csv")).unwrap()
    };
    assert_eq!(bytes("a"), bytes("b"));
}

#[test]
fn binary_rejects_unknown_axis() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), MINIMAL);
    let out = Command::new(env!("CARGO_BIN_EXE_fogsim"))
        .args(["sweep", cfg.to_str().unwrap(), "--axis", "weather"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("weather"));
}

#[test]
fn binary_reports_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[fleet]\nbattery_pct = [20.0, 120.0]\n");
    let out = Command::new(env!("CARGO_BIN_EXE_fogsim"))
        .arg("run")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("fleet.battery_pct"));
}

#[test]
fn shipped_configs_parse() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.toml");
    let cfg = fogsim_core::config::Config::load(&root).unwrap();
    assert_eq!(cfg, fogsim_core::config::Config::default());
}

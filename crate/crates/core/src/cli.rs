//! Experiment runner: single runs and parameter sweeps written as CSV and
//! JSON.
//!
//! CSV columns, in order: `scenario_id, axis_value, policy, reservation,
//! seed, avg_delay_s, total_delay_s, max_delay_s, min_delay_s,
//! avg_processing_s, total_cost_usd, sla_violation_pct, penalty_usd`.
//! Sweep files also carry one row per cell with `seed = "mean"`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Config, ConfigError, PolicySel, Range, ReservationSel};
use crate::engine::{self, EngineError, Scenario};
use crate::model::MetricsReport;

/// Env var naming the default output directory.
pub const OUT_DIR_ENV: &str = "FOGSIM_OUT_DIR";

pub const CSV_COLUMNS: [&str; 13] = [
    "scenario_id",
    "axis_value",
    "policy",
    "reservation",
    "seed",
    "avg_delay_s",
    "total_delay_s",
    "max_delay_s",
    "min_delay_s",
    "avg_processing_s",
    "total_cost_usd",
    "sla_violation_pct",
    "penalty_usd",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub scenario_id: String,
    pub axis_value: String,
    pub policy: String,
    pub reservation: String,
    pub seed: String,
    pub avg_delay_s: f64,
    pub total_delay_s: f64,
    pub max_delay_s: f64,
    pub min_delay_s: f64,
    pub avg_processing_s: f64,
    pub total_cost_usd: f64,
    pub sla_violation_pct: f64,
    pub penalty_usd: f64,
}

impl Row {
    pub fn from_report(scenario_id: &str, axis_value: &str, seed: &str, r: &MetricsReport) -> Self {
        Self {
            scenario_id: scenario_id.to_string(),
            axis_value: axis_value.to_string(),
            policy: r.policy.clone(),
            reservation: on_off(r.reservation).to_string(),
            seed: seed.to_string(),
            avg_delay_s: r.avg_delay,
            total_delay_s: r.total_delay,
            max_delay_s: r.max_delay,
            min_delay_s: r.min_delay,
            avg_processing_s: r.avg_processing,
            total_cost_usd: r.total_cost,
            sla_violation_pct: r.sla_violation_pct,
            penalty_usd: r.penalty_cost,
        }
    }

    fn metrics(&self) -> [f64; 8] {
        [
            self.avg_delay_s,
            self.total_delay_s,
            self.max_delay_s,
            self.min_delay_s,
            self.avg_processing_s,
            self.total_cost_usd,
            self.sla_violation_pct,
            self.penalty_usd,
        ]
    }

    fn with_metrics(mut self, m: [f64; 8]) -> Self {
        [
            self.avg_delay_s,
            self.total_delay_s,
            self.max_delay_s,
            self.min_delay_s,
            self.avg_processing_s,
            self.total_cost_usd,
            self.sla_violation_pct,
            self.penalty_usd,
        ] = m;
        self
    }
}

pub fn on_off(flag: bool) -> &'static str {
    if flag {
        "on"
    } else {
        "off"
    }
}

/// Sweep axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// 70 to 560 applications in steps of 70.
    Apps,
    /// 10% to 80% deadline variation in steps of 10.
    DeadlineVariation,
    /// Native-utilisation bands UP1..UP6.
    FreeResource,
    /// Initial battery bands BA1..BA6.
    Battery,
    /// Utilisation-swing bands AF1..AF9.
    Fluctuation,
}

/// One grid point of an axis: its label and how it changes the config.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub label: String,
    pub index: usize,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Apps => "apps",
            Axis::DeadlineVariation => "deadline_variation",
            Axis::FreeResource => "free_resource",
            Axis::Battery => "battery",
            Axis::Fluctuation => "fluctuation",
        }
    }

    pub fn cells(self) -> Vec<Cell> {
        let (n, label): (usize, fn(usize) -> String) = match self {
            Axis::Apps => (8, |k| (70 * k).to_string()),
            Axis::DeadlineVariation => (8, |k| (10 * k).to_string()),
            Axis::FreeResource => (6, |k| format!("UP{k}")),
            Axis::Battery => (6, |k| format!("BA{k}")),
            Axis::Fluctuation => (9, |k| format!("AF{k}")),
        };
        (1..=n).map(|k| Cell { label: label(k), index: k }).collect()
    }

    /// Applies grid point `k` (1-based) to `cfg`.
    pub fn apply(self, cfg: &mut Config, k: usize) {
        let k = k as f64;
        match self {
            Axis::Apps => cfg.scenario.app_count = (70.0 * k) as u32,
            Axis::DeadlineVariation => cfg.scenario.deadline_variation_pct = 10.0 * k,
            Axis::FreeResource => cfg.fleet.native_utilisation = Range::new(0.1 * (k - 1.0), 0.1 * k),
            Axis::Battery => cfg.fleet.battery_pct = Range::new(15.0 * (k - 1.0), 15.0 * k),
            Axis::Fluctuation => cfg.fleet.utilisation_variation = Range::new(0.0, 0.1 * k),
        }
    }
}

/// Writes `bytes` to `path` through a temporary file and a rename, so
/// readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp).map_err(io_err(&tmp))?;
        f.write_all(bytes).map_err(io_err(&tmp))?;
        f.sync_all().map_err(io_err(&tmp))?;
    }
    fs::rename(&tmp, path).map_err(io_err(path))
}

pub fn csv_bytes(rows: &[Row]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))
}

/// Runs every policy x reservation cell of one config.
pub fn run_config(cfg: &Config) -> Result<Vec<MetricsReport>, CliError> {
    cfg.validate()?;
    Scenario::expand(cfg)
        .iter()
        .map(|s| Ok(engine::run(s)?.report))
        .collect()
}

#[derive(Serialize)]
struct RunJson<'a> {
    seed: u64,
    reports: &'a [MetricsReport],
}

/// Runs the config at `config_path` and writes `report.csv` and
/// `report.json` into `out`. Nothing is written if the config is invalid or
/// a run fails.
pub fn run_scenario(config_path: &Path, out: &Path) -> Result<Vec<Row>, CliError> {
    let cfg = Config::load(config_path)?;
    let reports = run_config(&cfg)?;
    let seed = cfg.scenario.seed.to_string();
    let rows: Vec<Row> = reports.iter().map(|r| Row::from_report("run", "", &seed, r)).collect();
    let csv = csv_bytes(&rows)?;
    let json = serde_json::to_vec_pretty(&RunJson {
        seed: cfg.scenario.seed,
        reports: &reports,
    })?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    write_atomic(&out.join("report.csv"), &csv)?;
    write_atomic(&out.join("report.json"), &json)?;
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub axis: Axis,
    pub seeds: u32,
    pub out: PathBuf,
    pub workers: usize,
    pub policy: PolicySel,
    pub reservation: ReservationSel,
}

impl SweepOptions {
    pub fn new(axis: Axis, out: impl Into<PathBuf>) -> Self {
        Self {
            axis,
            seeds: 20,
            out: out.into(),
            workers: 0,
            policy: PolicySel::Both,
            reservation: ReservationSel::Both,
        }
    }
}

/// Per-seed rows and per-cell means of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<Row>,
    pub means: Vec<Row>,
}

fn cell_path(dir: &Path, axis: Axis, cell: &Cell, seed: u64) -> PathBuf {
    dir.join(format!("{}-{}-seed{}.json", axis.name(), cell.label, seed))
}

/// Runs one (cell, seed) job, reusing its file from an earlier invocation
/// when present.
fn sweep_job(base: &Config, opts: &SweepOptions, cell: &Cell, seed: u64, dir: &Path) -> Result<Vec<Row>, CliError> {
    let path = cell_path(dir, opts.axis, cell, seed);
    if let Ok(bytes) = fs::read(&path) {
        if let Ok(rows) = serde_json::from_slice::<Vec<Row>>(&bytes) {
            return Ok(rows);
        }
    }
    let mut cfg = base.clone();
    opts.axis.apply(&mut cfg, cell.index);
    cfg.scenario.seed = seed;
    cfg.scenario.policy = opts.policy;
    cfg.scenario.reservation = opts.reservation;
    let id = format!("{}={}", opts.axis.name(), cell.label);
    let rows: Vec<Row> = run_config(&cfg)?
        .iter()
        .map(|r| Row::from_report(&id, &cell.label, &seed.to_string(), r))
        .collect();
    write_atomic(&path, &serde_json::to_vec(&rows)?)?;
    Ok(rows)
}

/// Runs the axis grid over `opts.seeds` seeds starting at the config's
/// seed. Finished (cell, seed) jobs are cached under `out/cells/` and
/// skipped on re-invocation; results are ordered by cell, seed, policy and
/// reservation regardless of scheduling.
pub fn sweep_config(base: &Config, opts: &SweepOptions) -> Result<SweepResult, CliError> {
    base.validate()?;
    let dir = opts.out.join("cells");
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    let cells = opts.axis.cells();
    let jobs: Vec<(&Cell, u64)> = cells
        .iter()
        .flat_map(|c| (0..opts.seeds as u64).map(move |k| (c, base.scenario.seed + k)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;
    let per_job: Vec<Result<Vec<Row>, CliError>> = pool.install(|| {
        jobs.par_iter()
            .map(|(cell, seed)| sweep_job(base, opts, cell, *seed, &dir))
            .collect()
    });
    let mut rows = Vec::new();
    for r in per_job {
        rows.extend(r?);
    }

    let mut means = Vec::new();
    for cell in &cells {
        let in_cell: Vec<&Row> = rows.iter().filter(|r| r.axis_value == cell.label).collect();
        let mut keys: Vec<(String, String)> = Vec::new();
        for r in &in_cell {
            let k = (r.policy.clone(), r.reservation.clone());
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        for (policy, reservation) in keys {
            let group: Vec<&&Row> = in_cell
                .iter()
                .filter(|r| r.policy == policy && r.reservation == reservation)
                .collect();
            let mut sum = [0.0; 8];
            for r in &group {
                for (s, v) in sum.iter_mut().zip(r.metrics()) {
                    *s += v;
                }
            }
            let n = group.len() as f64;
            let mean = sum.map(|s| s / n);
            let mut row = (**group[0]).clone();
            row.seed = "mean".to_string();
            means.push(row.with_metrics(mean));
        }
    }
    Ok(SweepResult { rows, means })
}

/// Runs a sweep and writes `sweep-<axis>.csv` (per-seed rows then means)
/// into `opts.out`.
pub fn sweep(config_path: &Path, opts: &SweepOptions) -> Result<SweepResult, CliError> {
    let cfg = Config::load(config_path)?;
    let result = sweep_config(&cfg, opts)?;
    let mut all = result.rows.clone();
    all.extend(result.means.iter().cloned());
    write_atomic(
        &opts.out.join(format!("sweep-{}.csv", opts.axis.name())),
        &csv_bytes(&all)?,
    )?;
    Ok(result)
}

/// Output directory from the flag, the env var, or `./out`.
pub fn resolve_out(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_grids() {
        let labels = |a: Axis| a.cells().into_iter().map(|c| c.label).collect::<Vec<_>>();
        assert_eq!(labels(Axis::Apps), ["70", "140", "210", "280", "350", "420", "490", "560"]);
        assert_eq!(labels(Axis::DeadlineVariation), ["10", "20", "30", "40", "50", "60", "70", "80"]);
        assert_eq!(labels(Axis::Fluctuation).len(), 9);
        assert_eq!(labels(Axis::Fluctuation)[8], "AF9");
        assert_eq!(labels(Axis::FreeResource).len(), 6);
        assert_eq!(labels(Axis::Battery)[5], "BA6");
    }

    #[test]
    fn axis_application_stays_valid() {
        for axis in [Axis::Apps, Axis::DeadlineVariation, Axis::FreeResource, Axis::Battery, Axis::Fluctuation] {
            for c in axis.cells() {
                let mut cfg = Config::default();
                axis.apply(&mut cfg, c.index);
                cfg.validate().unwrap_or_else(|e| panic!("{} {}: {e}", axis.name(), c.label));
            }
        }
    }

    #[test]
    fn header_matches_columns() {
        let bytes = csv_bytes(&[]).unwrap();
        let header = String::from_utf8(bytes).unwrap();
        assert_eq!(header.trim_end(), CSV_COLUMNS.join(","));
    }
}

//! Scenario file format and validation.
//!
//! A config is one TOML document with `[scenario]`, `[fleet]`, `[network]`,
//! `[prices]`, `[sla]` and `[scoring]` sections. `[fleet]` may list devices
//! explicitly and `[[workload.tasks]]` may replace the generated workload,
//! which is how the fixtures pin the worked example.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{PriceBook, SlaTerms};
use crate::policy::{Feasibility, Policy};
use crate::scoring::ScoringConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Which policies a run covers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicySel {
    Mc,
    Baseline,
    #[default]
    Both,
}

impl PolicySel {
    pub fn policies(self) -> Vec<Policy> {
        match self {
            PolicySel::Mc => vec![Policy::Mc],
            PolicySel::Baseline => vec![Policy::Baseline],
            PolicySel::Both => vec![Policy::Mc, Policy::Baseline],
        }
    }
}

/// Which reservation settings a run covers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReservationSel {
    On,
    Off,
    #[default]
    Both,
}

impl ReservationSel {
    pub fn flags(self) -> Vec<bool> {
        match self {
            ReservationSel::On => vec![true],
            ReservationSel::Off => vec![false],
            ReservationSel::Both => vec![false, true],
        }
    }
}

/// Closed interval `[lo, hi]` written as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl From<[f64; 2]> for Range {
    fn from(v: [f64; 2]) -> Self {
        Self { lo: v[0], hi: v[1] }
    }
}

impl From<Range> for [f64; 2] {
    fn from(r: Range) -> Self {
        [r.lo, r.hi]
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub seed: u64,
    pub app_count: u32,
    pub tasks_per_app: u32,
    /// MI.
    pub task_length_mi: f64,
    /// Checkpoint granularity for migration, MI.
    pub subtask_length_mi: f64,
    pub data_size_bytes: Range,
    /// Response payload as a share of the request payload.
    pub response_ratio: f64,
    /// Relative deadline, s.
    pub deadline_s: Range,
    pub min_deadline_s: f64,
    /// Floor for a deadline after it has been changed, s from now.
    pub min_remaining_deadline_s: f64,
    /// Applications arrive uniformly over this window, s.
    pub arrival_window_s: f64,
    /// Share of arrivals per cluster; its length sets the cluster count.
    pub cluster_weights: Vec<f64>,
    /// Deadline variation, percent.
    pub deadline_variation_pct: f64,
    pub deadline_change_probability: f64,
    pub max_deadline_changes_per_task: u32,
    pub max_migrations_per_task: u32,
    /// Share of tasks whose results are also stored in the Cloud.
    pub cloud_fraction: f64,
    pub reservation_window_s: f64,
    pub policy: PolicySel,
    pub reservation: ReservationSel,
    pub feasibility: Feasibility,
    /// Unit costs for TC_req; the application's AT_cost when unset.
    pub fog_unit_cost: Option<f64>,
    pub cloud_unit_cost: Option<f64>,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            seed: 1,
            app_count: 70,
            tasks_per_app: 10,
            task_length_mi: 3000.0,
            subtask_length_mi: 500.0,
            data_size_bytes: Range::new(5120.0, 10240.0),
            response_ratio: 0.25,
            deadline_s: Range::new(4.0, 12.0),
            min_deadline_s: 4.0,
            min_remaining_deadline_s: 0.5,
            arrival_window_s: 400.0,
            cluster_weights: vec![0.6, 0.4],
            deadline_variation_pct: 30.0,
            deadline_change_probability: 1.0,
            max_deadline_changes_per_task: 1,
            max_migrations_per_task: 2,
            cloud_fraction: 0.1,
            reservation_window_s: 60.0,
            policy: PolicySel::Both,
            reservation: ReservationSel::Both,
            feasibility: Feasibility::Literal,
            fog_unit_cost: None,
            cloud_unit_cost: None,
        }
    }
}

/// An explicitly listed Fog device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSpec {
    pub id: u32,
    #[serde(default)]
    pub cluster: u32,
    pub mips: f64,
    #[serde(default)]
    pub native_utilisation: f64,
    /// Pins CAF_s instead of deriving it from the fluctuation history.
    #[serde(default)]
    pub caf: Option<f64>,
    pub distance_m: f64,
    #[serde(default = "default_battery")]
    pub battery_pct: f64,
    /// Battery drain per running task, %/min.
    #[serde(default = "default_discharge")]
    pub discharge_pct_per_min: f64,
    #[serde(default)]
    pub max_supported_distance_m: Option<f64>,
    /// Relative amplitude of native-utilisation swings, 0 for none.
    #[serde(default)]
    pub volatility: f64,
}

fn default_battery() -> f64 {
    100.0
}

fn default_discharge() -> f64 {
    1.0
}

/// Sets a device's native utilisation at a given time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilisationScript {
    pub time_s: f64,
    pub device: u32,
    pub native_utilisation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FleetSection {
    pub devices_per_cluster: u32,
    pub device_mips: Range,
    pub server_mips: f64,
    /// Port speed between users and a device, bits/s.
    pub device_bandwidth_bps: f64,
    /// Port speed between a device and its Fog server, bits/s.
    pub server_bandwidth_bps: f64,
    pub distance_m: Range,
    pub max_supported_distance_m: f64,
    pub battery_pct: Range,
    /// Battery drain per running task, %/min.
    pub discharge_pct_per_min: Range,
    /// Baseline native utilisation.
    pub native_utilisation: Range,
    /// Amplitude of native-utilisation swings relative to capacity.
    pub utilisation_variation: Range,
    pub fluctuation_interval_s: f64,
    /// CAF_s range: a steady CPU scores `hi`.
    pub caf_range: Range,
    pub history_len: usize,
    pub devices: Vec<DeviceSpec>,
    pub script: Vec<UtilisationScript>,
}

impl Default for FleetSection {
    fn default() -> Self {
        Self {
            devices_per_cluster: 20,
            device_mips: Range::new(2000.0, 6000.0),
            server_mips: 10000.0,
            device_bandwidth_bps: 1e6,
            server_bandwidth_bps: 1e7,
            distance_m: Range::new(5.0, 40.0),
            max_supported_distance_m: 50.0,
            battery_pct: Range::new(20.0, 90.0),
            discharge_pct_per_min: Range::new(0.05, 0.3),
            native_utilisation: Range::new(0.1, 0.5),
            utilisation_variation: Range::new(0.1, 0.4),
            fluctuation_interval_s: 5.0,
            caf_range: Range::new(0.5, 1.3),
            history_len: 10,
            devices: Vec::new(),
            script: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    /// Size of a registration or status message, bytes.
    pub status_message_bytes: f64,
    /// A_n per hop, s.
    pub const_overhead_s: f64,
    /// PR_d per hop, s.
    pub processing_delay_s: f64,
    pub queuing_delay_s: f64,
    pub with_queuing: bool,
    /// Extra latency for traffic between clusters, s.
    pub inter_cluster_s: f64,
    pub cloud_bandwidth_bps: f64,
    pub cloud_distance_km: f64,
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self {
            status_message_bytes: 256.0,
            const_overhead_s: 0.001,
            processing_delay_s: 0.0005,
            queuing_delay_s: 0.0,
            with_queuing: false,
            inter_cluster_s: 0.02,
            cloud_bandwidth_bps: 1e7,
            cloud_distance_km: 1000.0,
        }
    }
}

/// An explicitly listed task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub app: u32,
    pub length_mi: f64,
    pub data_size_bytes: f64,
    pub deadline_s: f64,
    #[serde(default)]
    pub submit_s: f64,
    #[serde(default)]
    pub cluster: u32,
    #[serde(default)]
    pub cloud: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkloadSection {
    pub tasks: Vec<TaskSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioSection,
    pub fleet: FleetSection,
    pub network: NetworkSection,
    pub workload: Option<WorkloadSection>,
    pub prices: PriceBook,
    pub sla: SlaTerms,
    pub scoring: ScoringConfig,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn cluster_count(&self) -> u32 {
        self.scenario.cluster_weights.len() as u32
    }

    /// Checks every field that the engine relies on; the error names the
    /// first offending field.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.scenario;
        let f = &self.fleet;
        let n = &self.network;

        positive("scenario.task_length_mi", s.task_length_mi)?;
        positive("scenario.subtask_length_mi", s.subtask_length_mi)?;
        range("scenario.data_size_bytes", s.data_size_bytes, 0.0, f64::INFINITY)?;
        non_negative("scenario.response_ratio", s.response_ratio)?;
        range("scenario.deadline_s", s.deadline_s, 0.0, f64::INFINITY)?;
        positive("scenario.min_deadline_s", s.min_deadline_s)?;
        positive("scenario.min_remaining_deadline_s", s.min_remaining_deadline_s)?;
        non_negative("scenario.arrival_window_s", s.arrival_window_s)?;
        if s.cluster_weights.is_empty() {
            return Err(invalid("scenario.cluster_weights", "at least one cluster is required"));
        }
        if s.cluster_weights.iter().any(|w| !(*w >= 0.0)) || !(s.cluster_weights.iter().sum::<f64>() > 0.0) {
            return Err(invalid("scenario.cluster_weights", "weights must be non-negative with a positive sum"));
        }
        if !(0.0..=100.0).contains(&s.deadline_variation_pct) {
            return Err(invalid(
                "scenario.deadline_variation_pct",
                format!("{} is outside [0, 100]", s.deadline_variation_pct),
            ));
        }
        fraction("scenario.deadline_change_probability", s.deadline_change_probability)?;
        fraction("scenario.cloud_fraction", s.cloud_fraction)?;
        positive("scenario.reservation_window_s", s.reservation_window_s)?;
        if let Some(c) = s.fog_unit_cost {
            non_negative("scenario.fog_unit_cost", c)?;
        }
        if let Some(c) = s.cloud_unit_cost {
            non_negative("scenario.cloud_unit_cost", c)?;
        }

        range("fleet.device_mips", f.device_mips, f64::MIN_POSITIVE, f64::INFINITY)?;
        positive("fleet.server_mips", f.server_mips)?;
        positive("fleet.device_bandwidth_bps", f.device_bandwidth_bps)?;
        positive("fleet.server_bandwidth_bps", f.server_bandwidth_bps)?;
        positive("fleet.max_supported_distance_m", f.max_supported_distance_m)?;
        range("fleet.distance_m", f.distance_m, 0.0, f.max_supported_distance_m)?;
        range("fleet.battery_pct", f.battery_pct, 0.0, 100.0)?;
        range("fleet.discharge_pct_per_min", f.discharge_pct_per_min, f64::MIN_POSITIVE, f64::INFINITY)?;
        range("fleet.native_utilisation", f.native_utilisation, 0.0, 0.95)?;
        range("fleet.utilisation_variation", f.utilisation_variation, 0.0, 1.0)?;
        positive("fleet.fluctuation_interval_s", f.fluctuation_interval_s)?;
        range("fleet.caf_range", f.caf_range, f64::MIN_POSITIVE, f64::INFINITY)?;
        if f.history_len < 2 {
            return Err(invalid("fleet.history_len", "need at least two samples"));
        }
        if f.devices.is_empty() && f.devices_per_cluster == 0 {
            return Err(invalid("fleet.devices_per_cluster", "the fleet has no devices"));
        }
        let mut ids = std::collections::BTreeSet::new();
        for (i, d) in f.devices.iter().enumerate() {
            let field = |name: &str| format!("fleet.devices[{i}].{name}");
            if !ids.insert(d.id) {
                return Err(invalid(&field("id"), format!("duplicate device id {}", d.id)));
            }
            if d.cluster >= self.cluster_count() {
                return Err(invalid(&field("cluster"), format!("no cluster {}", d.cluster)));
            }
            positive(&field("mips"), d.mips)?;
            if !(0.0..1.0).contains(&d.native_utilisation) {
                return Err(invalid(&field("native_utilisation"), "must lie in [0, 1)"));
            }
            if let Some(c) = d.caf {
                positive(&field("caf"), c)?;
            }
            let max = d.max_supported_distance_m.unwrap_or(f.max_supported_distance_m);
            positive(&field("max_supported_distance_m"), max)?;
            if !(0.0..=max).contains(&d.distance_m) {
                return Err(invalid(&field("distance_m"), format!("{} is outside [0, {max}]", d.distance_m)));
            }
            if !(0.0..=100.0).contains(&d.battery_pct) {
                return Err(invalid(&field("battery_pct"), format!("{} is outside [0, 100]", d.battery_pct)));
            }
            positive(&field("discharge_pct_per_min"), d.discharge_pct_per_min)?;
            fraction(&field("volatility"), d.volatility)?;
        }
        for (i, sc) in f.script.iter().enumerate() {
            let field = |name: &str| format!("fleet.script[{i}].{name}");
            non_negative(&field("time_s"), sc.time_s)?;
            if !(0.0..1.0).contains(&sc.native_utilisation) {
                return Err(invalid(&field("native_utilisation"), "must lie in [0, 1)"));
            }
            let known = if f.devices.is_empty() {
                sc.device >= 1 && sc.device <= f.devices_per_cluster * self.cluster_count()
            } else {
                ids.contains(&sc.device)
            };
            if !known {
                return Err(invalid(&field("device"), format!("no device {}", sc.device)));
            }
        }

        non_negative("network.status_message_bytes", n.status_message_bytes)?;
        non_negative("network.const_overhead_s", n.const_overhead_s)?;
        non_negative("network.processing_delay_s", n.processing_delay_s)?;
        non_negative("network.queuing_delay_s", n.queuing_delay_s)?;
        non_negative("network.inter_cluster_s", n.inter_cluster_s)?;
        positive("network.cloud_bandwidth_bps", n.cloud_bandwidth_bps)?;
        non_negative("network.cloud_distance_km", n.cloud_distance_km)?;

        if let Some(w) = &self.workload {
            for (i, t) in w.tasks.iter().enumerate() {
                let field = |name: &str| format!("workload.tasks[{i}].{name}");
                positive(&field("length_mi"), t.length_mi)?;
                non_negative(&field("data_size_bytes"), t.data_size_bytes)?;
                positive(&field("deadline_s"), t.deadline_s)?;
                non_negative(&field("submit_s"), t.submit_s)?;
                if t.cluster >= self.cluster_count() {
                    return Err(invalid(&field("cluster"), format!("no cluster {}", t.cluster)));
                }
            }
        }

        let p = &self.prices;
        for (name, v) in [
            ("prices.connectivity_unit", p.connectivity_unit),
            ("prices.messaging_unit", p.messaging_unit),
            ("prices.registry_unit", p.registry_unit),
            ("prices.processing_unit", p.processing_unit),
        ] {
            non_negative(name, v)?;
        }
        positive("prices.data_unit", p.data_unit)?;
        positive("prices.server_divisor", p.server_divisor)?;
        positive("prices.device_divisor", p.device_divisor)?;
        non_negative("sla.base_penalty", self.sla.base_penalty)?;
        non_negative("sla.penalty_rate", self.sla.penalty_rate)?;
        positive("scoring.mains_availability_minutes", self.scoring.mains_availability_minutes)?;
        Ok(())
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<(), ConfigError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be non-negative, got {v}")))
    }
}

fn fraction(field: &str, v: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(field, format!("{v} is outside [0, 1]")))
    }
}

fn range(field: &str, r: Range, min: f64, max: f64) -> Result<(), ConfigError> {
    if !(r.lo <= r.hi) {
        return Err(invalid(field, format!("lower bound {} exceeds upper bound {}", r.lo, r.hi)));
    }
    if r.lo < min {
        return Err(invalid(field, format!("lower bound {} is below {min}", r.lo)));
    }
    if r.hi > max {
        return Err(invalid(field, format!("upper bound {} exceeds {max}", r.hi)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_default() {
        assert_eq!(Config::from_toml("").unwrap(), Config::default());
    }

    #[test]
    fn battery_above_100_names_the_field() {
        let err = Config::from_toml("[fleet]\nbattery_pct = [20.0, 120.0]\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("fleet.battery_pct"), "{msg}");
        assert!(msg.contains("120"), "{msg}");
    }

    #[test]
    fn unknown_field_is_rejected() {
        let err = Config::from_toml("[scenario]\napp_cnt = 3\n").unwrap_err();
        assert!(err.to_string().contains("app_cnt"), "{err}");
    }

    #[test]
    fn explicit_device_errors_are_indexed() {
        let text = "[[fleet.devices]]\nid = 1\nmips = 100.0\ndistance_m = 99.0\n";
        let err = Config::from_toml(text).unwrap_err().to_string();
        assert!(err.contains("fleet.devices[0].distance_m"), "{err}");
    }

    #[test]
    fn selectors_expand() {
        assert_eq!(PolicySel::Both.policies(), vec![Policy::Mc, Policy::Baseline]);
        assert_eq!(ReservationSel::Both.flags(), vec![false, true]);
        assert_eq!(ReservationSel::On.flags(), vec![true]);
    }
}

//! Fleet construction and native-utilisation fluctuation.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::workload::uniform;
use super::{stream, FLEET_STREAM, FLUCTUATION_STREAM_BASE};
use crate::config::{Config, Range};
use crate::model::{FogNode, Tier};
use crate::scoring;

/// Native utilisation never exceeds this, so a device always offers some
/// capacity.
pub(crate) const MAX_NATIVE: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilisationSample {
    pub time: f64,
    pub native_utilisation: f64,
}

/// Periodic native-utilisation draws around a device's baseline: every
/// `interval` seconds the utilisation becomes `base + amplitude * u` with
/// `u` uniform in [-1, 1].
#[derive(Debug, Clone)]
pub struct FluctuationProcess {
    pub base: f64,
    pub amplitude: f64,
    pub interval: f64,
    next_time: f64,
    rng: ChaCha8Rng,
}

impl FluctuationProcess {
    /// One utilisation draw without advancing the clock.
    pub fn draw(&mut self) -> f64 {
        let u = uniform(&mut self.rng, Range::new(-1.0, 1.0));
        (self.base + self.amplitude * u).clamp(0.0, MAX_NATIVE.max(self.base))
    }

    pub fn is_constant(&self) -> bool {
        self.amplitude == 0.0
    }
}

impl Iterator for FluctuationProcess {
    type Item = UtilisationSample;

    fn next(&mut self) -> Option<UtilisationSample> {
        let native_utilisation = self.draw();
        let time = self.next_time;
        self.next_time += self.interval;
        Some(UtilisationSample {
            time,
            native_utilisation,
        })
    }
}

/// The utilisation process for `node`, centred on its current native
/// utilisation, with swings of up to `amplitude`.
pub fn fluctuation_process(node: &FogNode, amplitude: f64, interval: f64, rng: ChaCha8Rng) -> FluctuationProcess {
    FluctuationProcess {
        base: node.native_utilisation,
        amplitude,
        interval,
        next_time: interval,
        rng,
    }
}

/// CAF_s from a history of available CPU fractions.
pub(crate) fn caf_for(history: &[f64], range: Range) -> f64 {
    match scoring::cpu_fluctuation_rate(history) {
        Ok(fr) => scoring::caf_from_fluctuation(fr, range.lo, range.hi),
        Err(_) => range.hi,
    }
}

#[derive(Debug, Clone)]
pub struct DeviceSetup {
    pub node: FogNode,
    /// Battery drain per running task, %/min.
    pub discharge_rate: f64,
    pub fixed_caf: Option<f64>,
    pub process: FluctuationProcess,
}

#[derive(Debug, Clone)]
pub struct Fleet {
    pub devices: Vec<DeviceSetup>,
    /// One mains-powered Fog server per cluster.
    pub servers: Vec<FogNode>,
}

/// Devices from the explicit list if given, otherwise
/// `devices_per_cluster` per cluster drawn from the fleet stream. Each
/// device's history is pre-filled from its own fluctuation stream.
pub fn build_fleet(cfg: &Config) -> Fleet {
    let f = &cfg.fleet;
    let seed = cfg.scenario.seed;
    let mut devices = Vec::new();
    if f.devices.is_empty() {
        let mut rng = stream(seed, FLEET_STREAM);
        for c in 0..cfg.cluster_count() {
            for j in 0..f.devices_per_cluster {
                let id = c * f.devices_per_cluster + j + 1;
                let mut n = FogNode::device(id, uniform(&mut rng, f.device_mips));
                n.cluster = c;
                n.distance = uniform(&mut rng, f.distance_m);
                n.max_supported_distance = f.max_supported_distance_m;
                n.battery_charge = uniform(&mut rng, f.battery_pct);
                n.native_utilisation = uniform(&mut rng, f.native_utilisation);
                let discharge = uniform(&mut rng, f.discharge_pct_per_min);
                let amplitude = uniform(&mut rng, f.utilisation_variation);
                devices.push(setup(cfg, n, discharge, None, amplitude));
            }
        }
    } else {
        for d in &f.devices {
            let mut n = FogNode::device(d.id, d.mips);
            n.cluster = d.cluster;
            n.distance = d.distance_m;
            n.max_supported_distance = d.max_supported_distance_m.unwrap_or(f.max_supported_distance_m);
            n.battery_charge = d.battery_pct;
            n.native_utilisation = d.native_utilisation;
            devices.push(setup(cfg, n, d.discharge_pct_per_min, d.caf, d.volatility));
        }
    }
    let first_server = devices.iter().map(|d| d.node.id.0).max().unwrap_or(0) + 1;
    let servers = (0..cfg.cluster_count())
        .map(|c| {
            let mut s = FogNode::device(first_server + c, f.server_mips);
            s.tier = Tier::FogServer;
            s.cluster = c;
            s.mains_powered = true;
            s.max_supported_distance = f.max_supported_distance_m;
            s
        })
        .collect();
    Fleet { devices, servers }
}

fn setup(cfg: &Config, mut node: FogNode, discharge: f64, fixed_caf: Option<f64>, amplitude: f64) -> DeviceSetup {
    let f = &cfg.fleet;
    let rng = stream(cfg.scenario.seed, FLUCTUATION_STREAM_BASE + node.id.0 as u64);
    let mut process = fluctuation_process(&node, amplitude, f.fluctuation_interval_s, rng);
    let mut history = Vec::with_capacity(f.history_len);
    let mut last = node.native_utilisation;
    for _ in 0..f.history_len {
        last = if process.is_constant() { node.native_utilisation } else { process.draw() };
        history.push(1.0 - last);
    }
    node.native_utilisation = last;
    node.free_resource_fraction = 1.0 - last;
    node.caf_score = fixed_caf.unwrap_or_else(|| caf_for(&history, f.caf_range));
    node.fluctuation_history = history;
    node.discharge_rates = vec![discharge];
    DeviceSetup {
        node,
        discharge_rate: discharge,
        fixed_caf,
        process,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_fleet_shape() {
        let fleet = build_fleet(&Config::default());
        assert_eq!(fleet.devices.len(), 40);
        assert_eq!(fleet.servers.len(), 2);
        for d in &fleet.devices {
            crate::model::validate(&d.node).unwrap();
            assert_eq!(d.node.fluctuation_history.len(), 10);
            assert!((0.5..=1.3).contains(&d.node.caf_score));
        }
        assert!(fleet.servers.iter().all(|s| s.mains_powered && s.tier == Tier::FogServer));
    }

    #[test]
    fn zero_band_is_constant_with_zero_rate() {
        let mut cfg = Config::default();
        cfg.fleet.utilisation_variation = Range::point(0.0);
        let fleet = build_fleet(&cfg);
        for mut d in fleet.devices {
            let base = d.node.native_utilisation;
            let samples: Vec<_> = d.process.by_ref().take(20).collect();
            assert!(samples.iter().all(|s| s.native_utilisation == base));
            assert_eq!(scoring::cpu_fluctuation_rate(&d.node.fluctuation_history).unwrap(), 0.0);
            assert_eq!(d.node.caf_score, 1.3);
        }
    }

    #[test]
    fn fluctuation_trace_is_reproducible_and_in_band() {
        let node = FogNode {
            native_utilisation: 0.3,
            ..FogNode::device(1, 1000.0)
        };
        let trace = |seed| {
            fluctuation_process(&node, 0.25, 5.0, stream(seed, FLUCTUATION_STREAM_BASE + 1))
                .take(50)
                .collect::<Vec<_>>()
        };
        let a = trace(4);
        assert_eq!(a, trace(4));
        assert_ne!(a, trace(5));
        assert!(a.iter().all(|s| (0.05..=0.55).contains(&s.native_utilisation)));
        assert_eq!(a[0].time, 5.0);
        assert_eq!(a[1].time, 10.0);
    }
}

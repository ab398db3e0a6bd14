//! Seeded discrete-event simulation of task offloading onto Fog devices.
//!
//! Each run draws from independent ChaCha streams (workload, fleet,
//! deadlines, one per device for fluctuation), so changing one knob does
//! not reshuffle the others.

mod event;
mod fleet;
mod sim;
mod workload;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use event::{Event, EventKind, EventQueue};
pub use fleet::{build_fleet, fluctuation_process, DeviceSetup, Fleet, FluctuationProcess, UtilisationSample};
pub use sim::run;
pub use workload::{deadline_change_process, generate_workload, DeadlineChange, Workload};

use crate::config::{Config, ConfigError};
use crate::metrics::RequestRecord;
use crate::model::{MetricsReport, NodeId, TaskId};
use crate::policy::Policy;
use crate::pricing::PricingError;
use crate::scoring::ScoringError;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error(transparent)]
    Pricing(#[from] PricingError),
}

/// One fully specified run: a config plus a single policy and reservation
/// setting.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: Config,
    pub policy: Policy,
    pub reservation: bool,
}

impl Scenario {
    pub fn new(config: Config, policy: Policy, reservation: bool) -> Self {
        Self {
            config,
            policy,
            reservation,
        }
    }

    /// Every policy x reservation cell selected by the config, policies
    /// first.
    pub fn expand(config: &Config) -> Vec<Scenario> {
        let mut out = Vec::new();
        for p in config.scenario.policy.policies() {
            for r in config.scenario.reservation.flags() {
                out.push(Scenario::new(config.clone(), p, r));
            }
        }
        out
    }

    pub fn seed(&self) -> u64 {
        self.config.scenario.seed
    }
}

/// Named RNG streams under the scenario seed.
pub const WORKLOAD_STREAM: u64 = 1;
pub const FLEET_STREAM: u64 = 2;
pub const DEADLINE_STREAM: u64 = 3;
pub const FLUCTUATION_STREAM_BASE: u64 = 1 << 16;

/// The named stream `id` under `seed`.
pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Where a task ran and how it ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub task: TaskId,
    /// Devices in the order the task ran on them.
    pub placements: Vec<NodeId>,
    pub finish_time: f64,
    /// Flagged when no device could meet a changed deadline.
    pub flagged: bool,
    pub violated: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub events: u64,
    pub migrations: usize,
    pub violation_flags: usize,
    pub peer_placements: usize,
    pub deadline_changes: usize,
    pub submitted_work: f64,
    pub completed_work: f64,
    /// Times the per-device capacity check ran.
    pub capacity_checks: u64,
    /// Times allocated rate plus native load exceeded capacity.
    pub capacity_violations: u64,
    /// Peer-cluster admissions, and how many of them cleared the
    /// reservation gate.
    pub peer_admissions: u64,
    pub gated_admissions: u64,
}

/// A native-utilisation change as applied by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilisationTrace {
    pub time: f64,
    pub device: NodeId,
    pub native_utilisation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub report: MetricsReport,
    pub records: Vec<RequestRecord>,
    pub outcomes: Vec<TaskOutcome>,
    pub stats: SimStats,
    pub utilisation_trace: Vec<UtilisationTrace>,
}

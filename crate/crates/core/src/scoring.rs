//! Per-(task, node) quantities that the multi-criteria policy ranks on.
//!
//! Completion time de-rates the raw execution time by the node's free
//! resource share, its CPU-availability-fluctuation factor and its
//! distance-based throughput:
//!
//! ```text
//! C_t = E_t / (F_rs * CAF_s * T_bd)
//! A_s = A_v / C_t
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{FogNode, NetworkLink, NetworkPath, ScoreCard, Task, Violation};
use crate::network::{self, NetworkError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoringError {
    #[error("node capacity must be positive, got {0}")]
    InvalidNode(f64),
    #[error("node fails validation: {0:?}")]
    InvalidSnapshot(Vec<Violation>),
    #[error("link bandwidth and throughput must be positive (b_w={bandwidth}, t_h={throughput})")]
    InvalidLink { bandwidth: f64, throughput: f64 },
    #[error("battery-powered node has no discharge rates")]
    UndefinedAvailability,
    #[error("distance {distance} exceeds supported maximum {max}")]
    OutOfRange { distance: f64, max: f64 },
    #[error("fluctuation history needs at least two samples, got {0}")]
    InsufficientHistory(usize),
    #[error("fluctuation history contains a non-positive sample at index {0}")]
    ZeroSample(usize),
    #[error("de-rating factor must be positive, got {0}")]
    InvalidFactor(f64),
    #[error("completion time must be positive, got {0}")]
    ZeroCompletion(f64),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

pub type Result<T> = std::result::Result<T, ScoringError>;

/// How distance maps to throughput.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThroughputMode {
    /// `1 - G_d / SD_max`: throughput falls as distance grows.
    #[default]
    Decreasing,
    /// `G_d / SD_max` as literally written.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringConfig {
    pub throughput_mode: ThroughputMode,
    /// A_v reported for mains-powered nodes, minutes.
    pub mains_availability_minutes: f64,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        Self {
            throughput_mode: ThroughputMode::Decreasing,
            mains_availability_minutes: 1e6,
        }
    }
}

/// E_t = t_n / CPU_s.
pub fn execution_time(task: &Task, node: &FogNode) -> Result<f64> {
    if !(node.cpu_capacity > 0.0) {
        return Err(ScoringError::InvalidNode(node.cpu_capacity));
    }
    Ok(task.remaining() / node.cpu_capacity)
}

/// M_t = D_s / (b_w * t_h).
pub fn migration_time(data_size: f64, bandwidth: f64, throughput: f64) -> Result<f64> {
    if !(bandwidth > 0.0 && throughput > 0.0) {
        return Err(ScoringError::InvalidLink { bandwidth, throughput });
    }
    Ok(data_size / (bandwidth * throughput))
}

/// Migration time of `task` over `link` at throughput `t_h`.
pub fn task_migration_time(task: &Task, link: &NetworkLink, throughput: f64) -> Result<f64> {
    let bw = network::link_bandwidth(link)
        .map_err(|_| ScoringError::InvalidLink { bandwidth: link.endpoint_bandwidths.0.min(link.endpoint_bandwidths.1), throughput })?;
    migration_time(task.data_size, bw, throughput)
}

/// R_t = M_t + E_t + N_dL.
pub fn response_time(migration: f64, execution: f64, network_delay: f64) -> f64 {
    migration + execution + network_delay
}

/// A_v = A_b / sum(A_dr), minutes.
pub fn availability(node: &FogNode, cfg: &ScoringConfig) -> Result<f64> {
    if node.mains_powered {
        return Ok(cfg.mains_availability_minutes);
    }
    if node.battery_charge <= 0.0 {
        return Ok(0.0);
    }
    let total: f64 = node.discharge_rates.iter().sum();
    if node.discharge_rates.is_empty() || !(total > 0.0) {
        return Err(ScoringError::UndefinedAvailability);
    }
    Ok(node.battery_charge / total)
}

/// t_h from the node's distance to the user.
pub fn throughput_by_distance(node: &FogNode, mode: ThroughputMode) -> Result<f64> {
    let (d, max) = (node.distance, node.max_supported_distance);
    if !(max > 0.0) || d < 0.0 || d > max {
        return Err(ScoringError::OutOfRange { distance: d, max });
    }
    Ok(match mode {
        ThroughputMode::Decreasing => 1.0 - d / max,
        ThroughputMode::Literal => d / max,
    })
}

/// Per-interval fluctuation rates Fr_r = |x_i - x_{i-1}| / x_{i-1} * 100.
pub fn fluctuation_steps(history: &[f64]) -> Result<Vec<f64>> {
    if history.len() < 2 {
        return Err(ScoringError::InsufficientHistory(history.len()));
    }
    history
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            if !(w[0] > 0.0) {
                return Err(ScoringError::ZeroSample(i));
            }
            Ok((w[1] - w[0]).abs() / w[0] * 100.0)
        })
        .collect()
}

/// CPU_fr: mean of the per-interval fluctuation rates, percent.
pub fn cpu_fluctuation_rate(history: &[f64]) -> Result<f64> {
    let steps = fluctuation_steps(history)?;
    Ok(steps.iter().sum::<f64>() / steps.len() as f64)
}

/// Maps an observed fluctuation rate onto a CAF_s factor in `[lo, hi]`:
/// a perfectly steady CPU scores `hi`, and 100% average fluctuation or more
/// scores `lo`.
pub fn caf_from_fluctuation(cpu_fr: f64, lo: f64, hi: f64) -> f64 {
    let x = (cpu_fr / 100.0).clamp(0.0, 1.0);
    hi - (hi - lo) * x
}

/// C_t = E_t / (F_rs * CAF_s * T_bd).
pub fn completion_time(execution: f64, free_resource: f64, caf: f64, throughput: f64) -> Result<f64> {
    for f in [free_resource, caf, throughput] {
        if !(f > 0.0) {
            return Err(ScoringError::InvalidFactor(f));
        }
    }
    Ok(execution / (free_resource * caf * throughput))
}

/// A_s = A_v / C_t.
pub fn availability_score(availability: f64, completion: f64) -> Result<f64> {
    if !(completion > 0.0) {
        return Err(ScoringError::ZeroCompletion(completion));
    }
    Ok(availability / completion)
}

/// Fills a [`ScoreCard`] for running `task` on `node`, reached over `link`.
pub fn score_device(task: &Task, node: &FogNode, link: &NetworkLink, cfg: &ScoringConfig) -> Result<ScoreCard> {
    score_with_free(task, node, link, cfg, node.free_resource_fraction)
}

/// As [`score_device`] but with an explicit free-resource share, used when a
/// migration may draw on capacity the node holds in reserve.
pub fn score_with_free(
    task: &Task,
    node: &FogNode,
    link: &NetworkLink,
    cfg: &ScoringConfig,
    free_resource: f64,
) -> Result<ScoreCard> {
    crate::model::validate(node).map_err(ScoringError::InvalidSnapshot)?;
    let execution = execution_time(task, node)?;
    let throughput = throughput_by_distance(node, cfg.throughput_mode)?;
    let migration = task_migration_time(task, link, throughput)?;
    let network_delay = network::packetized_delay(task.data_size, &NetworkPath::new(vec![link.clone()]), false)?;
    let avail = availability(node, cfg)?;
    let completion = completion_time(execution, free_resource, node.caf_score, throughput)?;
    Ok(ScoreCard {
        node_id: node.id,
        execution_time: execution,
        migration_time: migration,
        response_time: response_time(migration, execution, network_delay),
        availability: avail,
        throughput_by_distance: throughput,
        completion_time: completion,
        availability_score: availability_score(avail, completion)?,
    })
}

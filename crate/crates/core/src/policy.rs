//! Allocation decisions: the multi-criteria ranking, history-based
//! reservation, deadline-change migration, and a processing-time-greedy
//! baseline for comparison.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{FogNode, NetworkLink, NetworkPath, NodeId, ReservationState, ScoreCard, Task};
use crate::network;
use crate::scoring::{self, ScoringConfig, ScoringError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Multi-criteria ranking with migration on deadline changes.
    Mc,
    /// Ranks on raw processing time plus round trip only.
    Baseline,
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Mc => "mc",
            Policy::Baseline => "baseline",
        })
    }
}

/// A node as seen by the allocator, with the link that reaches it.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub node: FogNode,
    pub link: NetworkLink,
}

/// How the migration feasibility test treats migration time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feasibility {
    /// `TE_T < deadline + M_t`.
    #[default]
    Literal,
    /// `TE_T < deadline - M_t`.
    Strict,
}

impl Feasibility {
    pub fn admits(self, completion: f64, deadline: f64, migration: f64) -> bool {
        match self {
            Feasibility::Literal => completion < deadline + migration,
            Feasibility::Strict => completion < deadline - migration,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RequestKind {
    Fresh,
    /// A running task must move; `deadline` is the time left to its
    /// (possibly updated) deadline.
    Migration { deadline: f64, feasibility: Feasibility },
}

fn by_completion(a: &ScoreCard, b: &ScoreCard) -> Ordering {
    a.completion_time
        .total_cmp(&b.completion_time)
        .then(a.node_id.cmp(&b.node_id))
}

/// Free share a migrating task may use: the node's reserved capacity is
/// released to it.
fn migration_free_share(node: &FogNode) -> f64 {
    let reserved = node.reservation.required_reservation / node.cpu_capacity;
    (node.free_resource_fraction + reserved).min(1.0)
}

/// Multi-criteria allocation.
///
/// Fresh requests score every candidate and return them sorted by
/// completion time. Migration requests score candidates with their reserved
/// capacity released, keep only those that finish within the deadline and
/// pass the migration-time test, and sort the survivors by completion time.
/// Returns `None` for an empty candidate list.
pub fn mc_allocate(
    task: &Task,
    candidates: &[Candidate],
    kind: RequestKind,
    cfg: &ScoringConfig,
) -> Result<Option<Vec<ScoreCard>>, ScoringError> {
    if candidates.is_empty() {
        return Ok(None);
    }
    let mut cards = Vec::with_capacity(candidates.len());
    match kind {
        RequestKind::Fresh => {
            for c in candidates {
                cards.push(scoring::score_device(task, &c.node, &c.link, cfg)?);
            }
        }
        RequestKind::Migration { deadline, feasibility } => {
            for c in candidates {
                let card = scoring::score_with_free(task, &c.node, &c.link, cfg, migration_free_share(&c.node))?;
                if card.completion_time <= deadline
                    && feasibility.admits(card.completion_time, deadline, card.migration_time)
                {
                    cards.push(card);
                }
            }
        }
    }
    cards.sort_by(by_completion);
    Ok(Some(cards))
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeadlineDecision {
    /// The current node still meets the deadline.
    Stay,
    Migrate(ScoreCard),
    /// No node can meet the deadline; the task stays put and is expected to
    /// violate its SLA.
    Violation,
}

/// Reacts to a changed deadline for `task`, currently on `current`.
///
/// Among migration-feasible nodes the one with the highest availability
/// score wins; ties go to the shorter completion time, then the lower id.
pub fn handle_deadline_change(
    task: &Task,
    new_deadline: f64,
    current: Option<NodeId>,
    nodes: &[Candidate],
    cfg: &ScoringConfig,
    feasibility: Feasibility,
) -> Result<DeadlineDecision, ScoringError> {
    if let Some(here) = current.and_then(|id| nodes.iter().find(|c| c.node.id == id)) {
        let card = scoring::score_device(task, &here.node, &here.link, cfg)?;
        if card.completion_time <= new_deadline {
            return Ok(DeadlineDecision::Stay);
        }
    }
    let others: Vec<Candidate> = nodes
        .iter()
        .filter(|c| Some(c.node.id) != current)
        .cloned()
        .collect();
    let kind = RequestKind::Migration {
        deadline: new_deadline,
        feasibility,
    };
    let tentative = mc_allocate(task, &others, kind, cfg)?.unwrap_or_default();
    let best = tentative.into_iter().max_by(|a, b| {
        a.availability_score
            .total_cmp(&b.availability_score)
            .then_with(|| by_completion(b, a))
    });
    Ok(match best {
        Some(card) => DeadlineDecision::Migrate(card),
        None => DeadlineDecision::Violation,
    })
}

/// Baseline ranking entry.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRank {
    pub node_id: NodeId,
    /// E_t on the raw capacity.
    pub processing_time: f64,
    /// Round-trip network delay to the node.
    pub round_trip: f64,
}

impl BaselineRank {
    pub fn key(&self) -> f64 {
        self.processing_time + self.round_trip
    }
}

/// Sorts candidates by raw processing time plus round trip, ignoring
/// fluctuation, distance and battery. Ties keep node-id order.
pub fn baseline_allocate(task: &Task, candidates: &[Candidate]) -> Result<Vec<BaselineRank>, ScoringError> {
    let mut ranks = candidates
        .iter()
        .map(|c| {
            let path = NetworkPath::new(vec![c.link.clone()]);
            Ok(BaselineRank {
                node_id: c.node.id,
                processing_time: scoring::execution_time(task, &c.node)?,
                round_trip: 2.0 * network::packetized_delay(task.data_size, &path, false)?,
            })
        })
        .collect::<Result<Vec<_>, ScoringError>>()?;
    ranks.sort_by(|a, b| a.key().total_cmp(&b.key()).then(a.node_id.cmp(&b.node_id)));
    Ok(ranks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReservationOutcome {
    Success,
    Failed,
}

/// Req_res = (R_v + L_AR) / T_AP, or 0 with no history.
pub fn required_reservation(state: &ReservationState) -> f64 {
    if state.total_apps_processed == 0 {
        0.0
    } else {
        (state.reserved_value + state.last_app_request) / state.total_apps_processed as f64
    }
}

/// Work volume seen in a window: request count times mean request size.
pub fn window_volume(requests: &[f64]) -> f64 {
    if requests.is_empty() {
        return 0.0;
    }
    let mean = requests.iter().sum::<f64>() / requests.len() as f64;
    mean * requests.len() as f64
}

/// Recomputes each device's reservation and folds it into its utilisation:
/// the device's free share becomes `1 - (CU_z + Req_res / CPU_s)`.
/// `current_util` maps device ids to CU_z; devices missing from it use their
/// native utilisation.
pub fn reserve(devices: &mut [FogNode], current_util: &BTreeMap<NodeId, f64>) -> ReservationOutcome {
    if devices.is_empty() {
        return ReservationOutcome::Failed;
    }
    for d in devices.iter_mut() {
        let cu = current_util.get(&d.id).copied().unwrap_or(d.native_utilisation);
        let req = required_reservation(&d.reservation);
        d.reservation.required_reservation = req;
        d.free_resource_fraction = (1.0 - (cu + req / d.cpu_capacity)).clamp(0.0, 1.0);
    }
    ReservationOutcome::Success
}

/// A device takes a peer-cluster request only if its free capacity minus
/// its reservation covers the request.
pub fn reservation_gate(node: &FogNode, busy_fraction: f64, demand: f64) -> bool {
    let free = node.cpu_capacity * (1.0 - busy_fraction) - node.reservation.required_reservation;
    free >= demand
}

//! Domain types shared across the simulator.
//!
//! Every quantity used by the network, pricing, scoring and metrics models
//! lives on exactly one of the types below; [`SYMBOLS`] records where.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Which layer of the hierarchy a node belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    FogDevice,
    FogServer,
    Cloud,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AppId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node-{}", self.0)
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "task-{}", self.0)
    }
}

/// History-based reservation bookkeeping for one device.
///
/// Values are in MIPS except `total_apps_processed`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReservationState {
    /// Volume of work requested in the last reservation window (R_v).
    pub reserved_value: f64,
    /// Size of the most recent request (L_AR).
    pub last_app_request: f64,
    /// Requests processed in the last window (T_AP).
    pub total_apps_processed: u32,
    /// Capacity currently withheld (Req_res).
    pub required_reservation: f64,
}

/// A compute node: a Fog device, a Fog server or the Cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FogNode {
    pub id: NodeId,
    pub tier: Tier,
    /// Cluster the node belongs to.
    pub cluster: u32,
    /// CPU_s, MIPS.
    pub cpu_capacity: f64,
    /// F_rs, share of the CPU currently free for Fog work.
    pub free_resource_fraction: f64,
    /// CU_z, share of the CPU used by native applications.
    pub native_utilisation: f64,
    /// A_b, percent.
    pub battery_charge: f64,
    /// A_dr, percent per minute for each running application.
    pub discharge_rates: Vec<f64>,
    /// Mains-powered nodes have no battery-derived availability limit.
    pub mains_powered: bool,
    /// G_d, meters.
    pub distance: f64,
    /// SD_max, meters.
    pub max_supported_distance: f64,
    /// Available-CPU fraction observed at each monitoring interval.
    pub fluctuation_history: Vec<f64>,
    /// CAF_s, de-rating factor for CPU availability fluctuation.
    pub caf_score: f64,
    pub reservation: ReservationState,
}

impl FogNode {
    /// A battery-powered Fog device with no running work and default bookkeeping.
    pub fn device(id: u32, cpu_capacity: f64) -> Self {
        Self {
            id: NodeId(id),
            tier: Tier::FogDevice,
            cluster: 0,
            cpu_capacity,
            free_resource_fraction: 1.0,
            native_utilisation: 0.0,
            battery_charge: 100.0,
            discharge_rates: vec![1.0],
            mains_powered: false,
            distance: 0.0,
            max_supported_distance: 40.0,
            fluctuation_history: Vec::new(),
            caf_score: 1.0,
            reservation: ReservationState::default(),
        }
    }

    /// Busy share of the CPU once the current reservation is counted.
    pub fn reserved_utilisation(&self) -> f64 {
        (1.0 - self.free_resource_fraction).clamp(0.0, 1.0)
    }
}

/// One violated invariant found by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonPositiveCapacity,
    FreeResourceOutOfRange { above: bool },
    NativeUtilisationOutOfRange,
    BatteryOutOfRange,
    NonPositiveDischargeRate,
    NegativeDistance,
    DistanceExceedsMax,
    NonPositiveMaxDistance,
    NonPositiveCaf,
    NegativeReservation,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            Violation::NonPositiveCapacity => "cpu_capacity <= 0",
            Violation::FreeResourceOutOfRange { above: true } => "free_resource_fraction > 1",
            Violation::FreeResourceOutOfRange { above: false } => "free_resource_fraction < 0",
            Violation::NativeUtilisationOutOfRange => "native_utilisation outside [0, 1]",
            Violation::BatteryOutOfRange => "battery_charge outside [0, 100]",
            Violation::NonPositiveDischargeRate => "discharge rate <= 0",
            Violation::NegativeDistance => "distance < 0",
            Violation::DistanceExceedsMax => "distance exceeds SD_max",
            Violation::NonPositiveMaxDistance => "max_supported_distance <= 0",
            Violation::NonPositiveCaf => "caf_score <= 0",
            Violation::NegativeReservation => "reservation value < 0",
        };
        f.write_str(msg)
    }
}

/// Checks every node invariant and reports all that fail.
pub fn validate(node: &FogNode) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    // `!(x > 0)` so NaN is rejected too
    if !(node.cpu_capacity > 0.0) {
        out.push(Violation::NonPositiveCapacity);
    }
    if node.free_resource_fraction > 1.0 {
        out.push(Violation::FreeResourceOutOfRange { above: true });
    } else if !(node.free_resource_fraction >= 0.0) {
        out.push(Violation::FreeResourceOutOfRange { above: false });
    }
    if !(0.0..=1.0).contains(&node.native_utilisation) {
        out.push(Violation::NativeUtilisationOutOfRange);
    }
    if !(0.0..=100.0).contains(&node.battery_charge) {
        out.push(Violation::BatteryOutOfRange);
    }
    if node.discharge_rates.iter().any(|r| !(*r > 0.0)) {
        out.push(Violation::NonPositiveDischargeRate);
    }
    if !(node.max_supported_distance > 0.0) {
        out.push(Violation::NonPositiveMaxDistance);
    }
    if node.distance < 0.0 {
        out.push(Violation::NegativeDistance);
    } else if node.distance > node.max_supported_distance {
        out.push(Violation::DistanceExceedsMax);
    }
    if !(node.caf_score > 0.0) {
        out.push(Violation::NonPositiveCaf);
    }
    let r = &node.reservation;
    if r.reserved_value < 0.0 || r.last_app_request < 0.0 || r.required_reservation < 0.0 {
        out.push(Violation::NegativeReservation);
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// A unit of offloaded work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    pub app_id: AppId,
    /// J_s / t_i, MI.
    pub length: f64,
    /// t_j, MI already executed.
    pub completed_work: f64,
    /// D_s, bits.
    pub data_size: f64,
    /// T_d, seconds relative to submission.
    pub deadline: f64,
    pub submit_time: f64,
}

impl Task {
    pub fn new(id: u32, length: f64, data_size: f64, deadline: f64) -> Self {
        Self {
            id: TaskId(id),
            app_id: AppId(0),
            length,
            completed_work: 0.0,
            data_size,
            deadline,
            submit_time: 0.0,
        }
    }

    /// t_n = t_i - t_j.
    pub fn remaining(&self) -> f64 {
        (self.length - self.completed_work).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Application {
    pub id: AppId,
    pub user_id: u32,
    /// Cluster the user is attached to.
    pub home_cluster: u32,
    pub tasks: Vec<Task>,
    /// Percent by which deadlines may be rescaled at run time.
    pub deadline_variation: f64,
    pub submit_time: f64,
}

/// A point-to-point link between two ports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkLink {
    /// b_w at both ends (C_A, C_B), bits/s.
    pub endpoint_bandwidths: (f64, f64),
    /// C, bits/s.
    pub capacity: f64,
    /// N_u, flows competing for the link.
    pub sharing_users: u32,
    /// M_th, 0 < M_th <= 1.
    pub medium_throughput: f64,
    /// Q_d, s.
    pub queuing_delay: f64,
    /// T_d, s.
    pub transmission_delay: f64,
    /// P_d (delta), s.
    pub propagation_delay: f64,
    /// PR_d, s.
    pub processing_delay: f64,
    /// L, bits.
    pub frame_length: f64,
    /// T_r, bits/s.
    pub transmission_rate: f64,
    /// A_n, constant per-hop processing and transmission overhead, s.
    pub const_overhead: f64,
}

impl NetworkLink {
    /// A symmetric link with no delays beyond serialization.
    pub fn symmetric(bandwidth: f64) -> Self {
        Self {
            endpoint_bandwidths: (bandwidth, bandwidth),
            capacity: bandwidth,
            sharing_users: 1,
            medium_throughput: 1.0,
            queuing_delay: 0.0,
            transmission_delay: 0.0,
            propagation_delay: 0.0,
            processing_delay: 0.0,
            frame_length: 0.0,
            transmission_rate: bandwidth,
            const_overhead: 0.0,
        }
    }
}

/// An ordered chain of links; `h` (hops) and `k` (intermediate links) are
/// both the link count.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkPath {
    pub links: Vec<NetworkLink>,
}

impl NetworkPath {
    pub fn new(links: Vec<NetworkLink>) -> Self {
        Self { links }
    }

    pub fn hop_count(&self) -> usize {
        self.links.len()
    }

    pub fn intermediate_link_count(&self) -> usize {
        self.links.len()
    }

    pub fn concat(&self, other: &NetworkPath) -> NetworkPath {
        let mut links = self.links.clone();
        links.extend(other.links.iter().cloned());
        NetworkPath { links }
    }
}

/// Per-(task, node) quantities used to rank candidates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreCard {
    pub node_id: NodeId,
    /// E_t, s.
    pub execution_time: f64,
    /// M_t, s.
    pub migration_time: f64,
    /// R_t, s.
    pub response_time: f64,
    /// A_v, minutes.
    pub availability: f64,
    /// T_bd / t_h.
    pub throughput_by_distance: f64,
    /// C_t, s.
    pub completion_time: f64,
    /// A_s.
    pub availability_score: f64,
}

/// Unit prices and tier divisors for the usage-based cost model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriceBook {
    /// CP, $ per million connection minutes.
    pub connectivity_unit: f64,
    /// MP, $ per million chargeable messages.
    pub messaging_unit: f64,
    /// SP, $ per million registry operations.
    pub registry_unit: f64,
    /// PP, $ per million rule executions.
    pub processing_unit: f64,
    /// U, KB per chargeable message.
    pub data_unit: f64,
    /// FS_x.
    pub server_divisor: f64,
    /// FD_x.
    pub device_divisor: f64,
}

impl Default for PriceBook {
    /// Lower bound of each published AWS IoT price range.
    fn default() -> Self {
        Self {
            connectivity_unit: 0.08,
            messaging_unit: 1.00,
            registry_unit: 1.25,
            processing_unit: 0.15,
            data_unit: 5.0,
            server_divisor: 2.0,
            device_divisor: 3.0,
        }
    }
}

/// Values split by tier (Cloud, Fog server, Fog device).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PerTier<T> {
    pub cloud: T,
    pub server: T,
    pub device: T,
}

impl<T> PerTier<T> {
    pub fn get_mut(&mut self, tier: Tier) -> &mut T {
        match tier {
            Tier::Cloud => &mut self.cloud,
            Tier::FogServer => &mut self.server,
            Tier::FogDevice => &mut self.device,
        }
    }

    pub fn get(&self, tier: Tier) -> &T {
        match tier {
            Tier::Cloud => &self.cloud,
            Tier::FogServer => &self.server,
            Tier::FogDevice => &self.device,
        }
    }
}

/// `count` messages (or rule executions) of `size_kb` each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Batch {
    pub size_kb: f64,
    pub count: u64,
}

/// Billable usage counters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct UsageLedger {
    /// C_c, C_FS, C_FD in minutes.
    pub connectivity_minutes: PerTier<f64>,
    /// M_c, M_FS, M_FD.
    pub messages: PerTier<Vec<Batch>>,
    /// SR_c, SR_FS, SR_FD in KB.
    pub registry_kb: PerTier<f64>,
    /// P_c, P_FS, P_FD.
    pub processing: PerTier<Vec<Batch>>,
}

impl UsageLedger {
    pub fn add_connectivity(&mut self, tier: Tier, minutes: f64) {
        *self.connectivity_minutes.get_mut(tier) += minutes;
    }

    pub fn add_messages(&mut self, tier: Tier, size_kb: f64, count: u64) {
        self.messages.get_mut(tier).push(Batch { size_kb, count });
    }

    pub fn add_registry(&mut self, tier: Tier, kb: f64) {
        *self.registry_kb.get_mut(tier) += kb;
    }

    pub fn add_processing(&mut self, tier: Tier, size_kb: f64, count: u64) {
        self.processing.get_mut(tier).push(Batch { size_kb, count });
    }

    /// Appends all of `other`'s usage.
    pub fn merge(&mut self, other: &UsageLedger) {
        for tier in [Tier::Cloud, Tier::FogServer, Tier::FogDevice] {
            *self.connectivity_minutes.get_mut(tier) += other.connectivity_minutes.get(tier);
            *self.registry_kb.get_mut(tier) += other.registry_kb.get(tier);
            self.messages.get_mut(tier).extend_from_slice(other.messages.get(tier));
            self.processing.get_mut(tier).extend_from_slice(other.processing.get(tier));
        }
    }

    pub fn is_valid(&self) -> bool {
        let tiers = [Tier::Cloud, Tier::FogServer, Tier::FogDevice];
        tiers.iter().all(|&t| {
            *self.connectivity_minutes.get(t) >= 0.0
                && *self.registry_kb.get(t) >= 0.0
                && self.messages.get(t).iter().all(|b| b.size_kb >= 0.0)
                && self.processing.get(t).iter().all(|b| b.size_kb >= 0.0)
        })
    }
}

/// Packet counts and per-leg transfer times for one request (or a sum of
/// requests). Response legs are tracked separately from forward legs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrafficCounters {
    /// P_u.
    pub user_packets: u64,
    /// PC_u.
    pub cloud_packets: u64,
    /// PC_u^r.
    pub cloud_response_packets: u64,
    /// (P_u - PC_u)^r.
    pub fog_response_packets: u64,
    /// P_ip^Fog.
    pub internal_fog_packets: u64,
    /// P_ip^Cloud.
    pub internal_cloud_packets: u64,
    /// P_ip^r.
    pub internal_response_packets: u64,
    /// tP_u.
    pub user_time: f64,
    /// tPC_u.
    pub cloud_time: f64,
    /// tPC_u^r.
    pub cloud_response_time: f64,
    /// (tP_u - tPC_u)^r.
    pub fog_response_time: f64,
    /// tP_ip^Fog.
    pub internal_fog_time: f64,
    /// tP_ip^rFog.
    pub internal_fog_response_time: f64,
    /// tP_ip^Cloud.
    pub internal_cloud_time: f64,
    /// tP_ip^rCloud.
    pub internal_cloud_response_time: f64,
    /// tP_fd.
    pub device_processing_time: f64,
    /// tP_fs.
    pub server_processing_time: f64,
    /// tP_c.
    pub cloud_processing_time: f64,
}

impl TrafficCounters {
    pub fn add(&mut self, o: &TrafficCounters) {
        self.user_packets += o.user_packets;
        self.cloud_packets += o.cloud_packets;
        self.cloud_response_packets += o.cloud_response_packets;
        self.fog_response_packets += o.fog_response_packets;
        self.internal_fog_packets += o.internal_fog_packets;
        self.internal_cloud_packets += o.internal_cloud_packets;
        self.internal_response_packets += o.internal_response_packets;
        self.user_time += o.user_time;
        self.cloud_time += o.cloud_time;
        self.cloud_response_time += o.cloud_response_time;
        self.fog_response_time += o.fog_response_time;
        self.internal_fog_time += o.internal_fog_time;
        self.internal_fog_response_time += o.internal_fog_response_time;
        self.internal_cloud_time += o.internal_cloud_time;
        self.internal_cloud_response_time += o.internal_cloud_response_time;
        self.device_processing_time += o.device_processing_time;
        self.server_processing_time += o.server_processing_time;
        self.cloud_processing_time += o.cloud_processing_time;
    }
}

/// Linear SLA penalty: `base_penalty + penalty_rate * delay_time`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlaTerms {
    /// alpha, $.
    pub base_penalty: f64,
    /// beta, $/s.
    pub penalty_rate: f64,
    /// DT, s. Ignored by the engine, which measures it per request.
    pub delay_time: f64,
}

impl Default for SlaTerms {
    fn default() -> Self {
        Self {
            base_penalty: 0.1,
            penalty_rate: 0.05,
            delay_time: 0.0,
        }
    }
}

/// Aggregated results of one scenario run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub policy: String,
    pub reservation: bool,
    pub requests: usize,
    pub avg_delay: f64,
    pub total_delay: f64,
    pub max_delay: f64,
    pub min_delay: f64,
    pub avg_processing: f64,
    /// CTU_avg.
    pub ctu_avg: f64,
    /// CTA per application.
    pub cta: Vec<f64>,
    /// CTA_avg.
    pub cta_avg: f64,
    /// TC_req per request.
    pub tc_req: Vec<f64>,
    /// TC.
    pub tc: f64,
    /// Sum of per-application AT_cost.
    pub total_cost: f64,
    pub sla_violation_pct: f64,
    pub penalty_cost: f64,
    pub migrations: usize,
    pub peer_placements: usize,
    /// True when a denominator was empty and the matching average was set to 0.
    pub empty: bool,
}

/// Where each symbol of the implemented formulas lives, as
/// `(symbol, type)`. Each symbol appears once.
///
/// ```
/// use std::collections::HashSet;
/// let mut seen = HashSet::new();
/// for (sym, ty) in fogsim_core::model::SYMBOLS {
///     assert!(seen.insert(*sym), "{sym} is listed twice");
///     assert!(!ty.is_empty());
/// }
/// ```
pub const SYMBOLS: &[(&str, &str)] = &[
    ("CPU_s", "FogNode"),
    ("F_rs", "FogNode"),
    ("CU_z", "FogNode"),
    ("A_b", "FogNode"),
    ("A_dr", "FogNode"),
    ("G_d", "FogNode"),
    ("SD_max", "FogNode"),
    ("Fr_r", "FogNode"),
    ("CPU_fr", "FogNode"),
    ("CAF_s", "FogNode"),
    ("J_s", "Task"),
    ("t_i", "Task"),
    ("t_j", "Task"),
    ("t_n", "Task"),
    ("D_s", "Task"),
    ("T_d", "Task"),
    ("b_w", "NetworkLink"),
    ("B_WL", "NetworkLink"),
    ("AB_WL", "NetworkLink"),
    ("C", "NetworkLink"),
    ("N_u", "NetworkLink"),
    ("M_th", "NetworkLink"),
    ("Q_d", "NetworkLink"),
    ("P_d", "NetworkLink"),
    ("PR_d", "NetworkLink"),
    ("L", "NetworkLink"),
    ("T_r", "NetworkLink"),
    ("A_n", "NetworkLink"),
    ("N_dL", "NetworkLink"),
    ("B_WP", "NetworkPath"),
    ("AB_WP", "NetworkPath"),
    ("N_dP", "NetworkPath"),
    ("Q_dp", "NetworkPath"),
    ("T_dp", "NetworkPath"),
    ("P_dp", "NetworkPath"),
    ("PR_dp", "NetworkPath"),
    ("D_fixed", "NetworkPath"),
    ("W", "NetworkPath"),
    ("h", "NetworkPath"),
    ("k", "NetworkPath"),
    ("E_t", "ScoreCard"),
    ("M_t", "ScoreCard"),
    ("R_t", "ScoreCard"),
    ("A_v", "ScoreCard"),
    ("T_bd", "ScoreCard"),
    ("t_h", "ScoreCard"),
    ("C_t", "ScoreCard"),
    ("A_s", "ScoreCard"),
    ("R_v", "ReservationState"),
    ("L_AR", "ReservationState"),
    ("T_AP", "ReservationState"),
    ("Req_res", "ReservationState"),
    ("CP", "PriceBook"),
    ("MP", "PriceBook"),
    ("SP", "PriceBook"),
    ("PP", "PriceBook"),
    ("U", "PriceBook"),
    ("FS_x", "PriceBook"),
    ("FD_x", "PriceBook"),
    ("C_c", "UsageLedger"),
    ("C_FS", "UsageLedger"),
    ("C_FD", "UsageLedger"),
    ("M_c", "UsageLedger"),
    ("M_FS", "UsageLedger"),
    ("M_FD", "UsageLedger"),
    ("SR_c", "UsageLedger"),
    ("SR_FS", "UsageLedger"),
    ("SR_FD", "UsageLedger"),
    ("P_c", "UsageLedger"),
    ("P_FS", "UsageLedger"),
    ("P_FD", "UsageLedger"),
    ("P_u", "TrafficCounters"),
    ("PC_u", "TrafficCounters"),
    ("P_ip", "TrafficCounters"),
    ("tP_u", "TrafficCounters"),
    ("tPC_u", "TrafficCounters"),
    ("tP_ip", "TrafficCounters"),
    ("tP_fd", "TrafficCounters"),
    ("tP_fs", "TrafficCounters"),
    ("tP_c", "TrafficCounters"),
    ("alpha", "SlaTerms"),
    ("beta", "SlaTerms"),
    ("DT", "SlaTerms"),
    ("CTU_avg", "MetricsReport"),
    ("CTA", "MetricsReport"),
    ("CTA_avg", "MetricsReport"),
    ("TC_req", "MetricsReport"),
    ("TC", "MetricsReport"),
];

#[cfg(test)]
mod tests {
    use super::*;

    fn table_node() -> FogNode {
        let mut n = FogNode::device(1, 2000.0);
        n.free_resource_fraction = 0.5;
        n.native_utilisation = 0.5;
        n.battery_charge = 60.0;
        n.discharge_rates = vec![0.5, 0.2, 0.3];
        n.distance = 20.0;
        n.max_supported_distance = 40.0;
        n
    }

    #[test]
    fn table_range_node_is_valid() {
        assert_eq!(validate(&table_node()), Ok(()));
    }

    #[test]
    fn free_resource_above_one() {
        let mut n = table_node();
        n.free_resource_fraction = 1.2;
        let v = validate(&n).unwrap_err();
        assert_eq!(v, vec![Violation::FreeResourceOutOfRange { above: true }]);
        assert_eq!(v[0].to_string(), "free_resource_fraction > 1");
    }

    #[test]
    fn distance_beyond_supported() {
        let mut n = table_node();
        n.distance = 50.0;
        n.max_supported_distance = 40.0;
        let v = validate(&n).unwrap_err();
        assert_eq!(v, vec![Violation::DistanceExceedsMax]);
        assert_eq!(v[0].to_string(), "distance exceeds SD_max");
    }

    #[test]
    fn reports_every_violation() {
        let mut n = table_node();
        n.cpu_capacity = 0.0;
        n.battery_charge = 120.0;
        n.caf_score = 0.0;
        n.discharge_rates = vec![0.0];
        let v = validate(&n).unwrap_err();
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn validation_is_idempotent() {
        let mut n = table_node();
        n.native_utilisation = 2.0;
        let before = n.clone();
        let a = validate(&n);
        let b = validate(&n);
        assert_eq!(a, b);
        assert_eq!(n, before);
    }

    #[test]
    fn remaining_work_is_derived() {
        let mut t = Task::new(0, 3000.0, 40960.0, 4.0);
        t.completed_work = 1000.0;
        assert_eq!(t.remaining(), 2000.0);
    }

    #[test]
    fn ledger_merge_accumulates() {
        let mut a = UsageLedger::default();
        a.add_connectivity(Tier::Cloud, 1.0);
        a.add_messages(Tier::FogDevice, 5.0, 2);
        let mut b = UsageLedger::default();
        b.add_connectivity(Tier::Cloud, 2.0);
        b.add_messages(Tier::FogDevice, 7.0, 1);
        a.merge(&b);
        assert_eq!(a.connectivity_minutes.cloud, 3.0);
        assert_eq!(a.messages.device.len(), 2);
        assert!(a.is_valid());
    }
}

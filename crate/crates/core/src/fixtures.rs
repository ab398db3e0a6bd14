//! The five-device worked example used for golden tests.
//!
//! Capacities for FD4 and FD5 are 2000 and 3000 MIPS so that a 1000 MI job
//! takes 0.5 s and 1/3 s, the execution times the completion-time table is
//! computed from. (The device-parameter table lists 200 and 300 MIPS, which
//! would give 5 s and 3.33 s.)

use crate::model::{FogNode, NetworkLink, Task};
use crate::policy::Candidate;

/// One row of the worked example.
#[derive(Debug, Clone, Copy)]
pub struct FdRow {
    pub id: u32,
    /// Capacity listed in the device-parameter table.
    pub listed_capacity: f64,
    /// Capacity consistent with the completion-time table.
    pub capacity: f64,
    pub execution_time: f64,
    pub free_resource: f64,
    pub caf: f64,
    pub throughput: f64,
    /// Minutes.
    pub availability: f64,
    pub completion_time: f64,
    pub availability_score: f64,
}

pub const FD_ROWS: [FdRow; 5] = [
    FdRow {
        id: 1,
        listed_capacity: 1000.0,
        capacity: 1000.0,
        execution_time: 1.0,
        free_resource: 0.5,
        caf: 0.5,
        throughput: 0.9,
        availability: 10.0,
        completion_time: 4.44,
        availability_score: 2.25,
    },
    FdRow {
        id: 2,
        listed_capacity: 500.0,
        capacity: 500.0,
        execution_time: 2.0,
        free_resource: 0.6,
        caf: 0.8,
        throughput: 0.8,
        availability: 12.0,
        completion_time: 5.21,
        availability_score: 2.304,
    },
    FdRow {
        id: 3,
        listed_capacity: 100.0,
        capacity: 100.0,
        execution_time: 10.0,
        free_resource: 0.3,
        caf: 1.0,
        throughput: 0.5,
        availability: 20.0,
        completion_time: 66.67,
        availability_score: 0.3,
    },
    FdRow {
        id: 4,
        listed_capacity: 200.0,
        capacity: 2000.0,
        execution_time: 0.5,
        free_resource: 0.4,
        caf: 1.3,
        throughput: 0.7,
        availability: 30.0,
        completion_time: 1.37,
        availability_score: 21.84,
    },
    FdRow {
        id: 5,
        listed_capacity: 300.0,
        capacity: 3000.0,
        // tabulated as 0.33
        execution_time: 1.0 / 3.0,
        free_resource: 0.2,
        caf: 0.9,
        throughput: 0.55,
        availability: 5.0,
        completion_time: 3.37,
        availability_score: 1.485,
    },
];

/// Max supported distance used by the fixture, meters.
pub const FD_MAX_DISTANCE: f64 = 40.0;

/// Fixture node for `row`: distance is chosen so that `1 - G_d / SD_max`
/// equals the tabulated throughput, and the battery drains at 1 %/min so
/// that A_v equals the tabulated availability.
pub fn fd_node(row: &FdRow) -> FogNode {
    let mut n = FogNode::device(row.id, row.capacity);
    n.free_resource_fraction = row.free_resource;
    n.native_utilisation = 1.0 - row.free_resource;
    n.caf_score = row.caf;
    n.max_supported_distance = FD_MAX_DISTANCE;
    n.distance = (1.0 - row.throughput) * FD_MAX_DISTANCE;
    n.battery_charge = row.availability;
    n.discharge_rates = vec![1.0];
    n
}

/// The 1000 MI, deadline-5 job and the five candidate devices.
pub fn fd_table() -> (Task, Vec<Candidate>) {
    let task = Task::new(0, 1000.0, 40960.0, 5.0);
    let nodes = FD_ROWS
        .iter()
        .map(|row| Candidate {
            node: fd_node(row),
            link: NetworkLink::symmetric(1e5),
        })
        .collect();
    (task, nodes)
}

/// Scenario file reproducing the worked example end to end.
pub const FD_TABLE_CONFIG: &str = include_str!("../fixtures/fd-table.toml");

/// The same fixture with a native-utilisation spike on FD4 shortly after
/// the job starts.
pub const FD_TABLE_SPIKE_CONFIG: &str = include_str!("../fixtures/fd-table-spike.toml");

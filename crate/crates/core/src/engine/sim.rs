//! The event loop.
//!
//! A device runs its active tasks by splitting its free capacity
//! `CPU_s * (1 - native)` equally among them, de-rated by
//! `min(1, CAF_s * T_bd)`. Tasks reach a device after the upload and a
//! registration message to the cluster's Fog server; on completion a status
//! message goes back to the server and the result returns to the user,
//! through the Cloud for tasks stored there.

use std::collections::BTreeMap;

use super::event::{EventKind, EventQueue};
use super::fleet::{build_fleet, caf_for, DeviceSetup};
use super::workload::{build, deadline_plan, Workload};
use super::{EngineError, RunOutput, Scenario, SimStats, TaskOutcome, UtilisationTrace};
use crate::config::Config;
use crate::metrics::{self, RequestRecord};
use crate::model::{FogNode, NetworkLink, NetworkPath, NodeId, Task, TrafficCounters};
use crate::network::{self, Medium};
use crate::policy::{self, Candidate, DeadlineDecision, Policy, RequestKind};
use crate::pricing;
use crate::scoring;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Pending,
    Transit,
    Running,
    Migrating,
    Done,
}

#[derive(Debug, Clone)]
struct TaskRun {
    task: Task,
    app: usize,
    home: u32,
    cloud: bool,
    deadline_abs: f64,
    /// MIPS needed to finish within the original deadline.
    demand: f64,
    device: Option<usize>,
    phase: Phase,
    epoch: u32,
    rate: f64,
    counters: TrafficCounters,
    /// Expected time from completion to the user receiving the result.
    post_estimate: f64,
    migrations: u32,
    recheck: bool,
    flagged: bool,
    placements: Vec<NodeId>,
    finish: f64,
}

#[derive(Debug, Clone)]
struct DeviceRun {
    setup: DeviceSetup,
    active: Vec<usize>,
    /// Demand of tasks assigned here, running or on their way.
    committed: f64,
    assigned: u32,
    last_update: f64,
    version: u64,
    window: Vec<f64>,
    last_request: f64,
}

impl DeviceRun {
    fn node(&self) -> &FogNode {
        &self.setup.node
    }

    fn spare_mips(&self) -> f64 {
        let n = self.node();
        n.cpu_capacity * (1.0 - n.native_utilisation) - self.committed
    }

    fn busy_fraction(&self) -> f64 {
        let n = self.node();
        n.native_utilisation + self.committed / n.cpu_capacity
    }
}

struct Sim<'a> {
    cfg: &'a Config,
    policy: Policy,
    reservation: bool,
    now: f64,
    queue: EventQueue,
    tasks: Vec<TaskRun>,
    devices: Vec<DeviceRun>,
    workload: Workload,
    pending_apps: usize,
    outstanding: usize,
    stats: SimStats,
    records: Vec<RequestRecord>,
    trace: Vec<UtilisationTrace>,
}

/// Runs one scenario to completion.
pub fn run(scenario: &Scenario) -> Result<RunOutput, EngineError> {
    scenario.config.validate()?;
    let mut sim = Sim::new(scenario);
    sim.schedule_initial();
    while let Some(ev) = sim.queue.pop() {
        sim.now = ev.time;
        sim.stats.events += 1;
        sim.handle(ev.kind)?;
    }
    sim.finish()
}

impl<'a> Sim<'a> {
    fn new(s: &'a Scenario) -> Self {
        let cfg = &s.config;
        let workload = build(cfg);
        let fleet = build_fleet(cfg);
        let mut tasks = Vec::with_capacity(workload.task_count());
        for (ai, app) in workload.apps.iter().enumerate() {
            for t in &app.tasks {
                tasks.push(TaskRun {
                    task: t.clone(),
                    app: ai,
                    home: app.home_cluster,
                    cloud: workload.cloud[t.id.0 as usize],
                    deadline_abs: app.submit_time + t.deadline,
                    demand: t.length / t.deadline,
                    device: None,
                    phase: Phase::Pending,
                    epoch: 0,
                    rate: 0.0,
                    counters: TrafficCounters::default(),
                    post_estimate: 0.0,
                    migrations: 0,
                    recheck: false,
                    flagged: false,
                    placements: Vec::new(),
                    finish: 0.0,
                });
            }
        }
        let devices = fleet
            .devices
            .into_iter()
            .map(|setup| DeviceRun {
                setup,
                active: Vec::new(),
                committed: 0.0,
                assigned: 0,
                last_update: 0.0,
                version: 0,
                window: Vec::new(),
                last_request: 0.0,
            })
            .collect();
        let stats = SimStats {
            submitted_work: tasks.iter().map(|t| t.task.length).fold(0.0, |a, b| a + b),
            ..SimStats::default()
        };
        Sim {
            cfg,
            policy: s.policy,
            reservation: s.reservation,
            now: 0.0,
            queue: EventQueue::new(),
            outstanding: tasks.len(),
            pending_apps: workload.apps.len(),
            tasks,
            devices,
            workload,
            stats,
            records: Vec::new(),
            trace: Vec::new(),
        }
    }

    fn active(&self) -> bool {
        self.pending_apps > 0 || self.outstanding > 0
    }

    fn schedule_initial(&mut self) {
        for (i, app) in self.workload.apps.iter().enumerate() {
            self.queue.push(app.submit_time, EventKind::AppSubmitted { app: i });
        }
        for change in deadline_plan(self.cfg, &self.workload) {
            self.queue.push(
                change.time,
                EventKind::DeadlineChanged {
                    task: change.task.0 as usize,
                    factor: change.factor,
                },
            );
        }
        if !self.active() {
            return;
        }
        for d in 0..self.devices.len() {
            if !self.devices[d].setup.process.is_constant() {
                self.schedule_fluctuation(d);
            }
        }
        for sc in &self.cfg.fleet.script {
            if let Some(d) = self.devices.iter().position(|x| x.node().id.0 == sc.device) {
                self.queue.push(
                    sc.time_s,
                    EventKind::UtilisationChanged {
                        device: d,
                        native: sc.native_utilisation,
                        scripted: true,
                    },
                );
            }
        }
        if self.reservation {
            self.queue
                .push(self.cfg.scenario.reservation_window_s, EventKind::ReservationRotated);
        }
    }

    fn schedule_fluctuation(&mut self, d: usize) {
        if let Some(s) = self.devices[d].setup.process.next() {
            self.queue.push(
                s.time,
                EventKind::UtilisationChanged {
                    device: d,
                    native: s.native_utilisation,
                    scripted: false,
                },
            );
        }
    }

    fn handle(&mut self, kind: EventKind) -> Result<(), EngineError> {
        match kind {
            EventKind::AppSubmitted { app } => {
                self.pending_apps -= 1;
                let first = self.tasks.iter().position(|t| t.app == app);
                if let Some(first) = first {
                    let n = self.workload.apps[app].tasks.len();
                    for t in first..first + n {
                        self.place_fresh(t)?;
                    }
                }
            }
            EventKind::TaskStarted { task, epoch } => {
                let t = &self.tasks[task];
                if t.epoch == epoch && t.phase == Phase::Transit {
                    self.start_running(task)?;
                }
            }
            EventKind::MigrationCompleted { task, epoch } => {
                let t = &self.tasks[task];
                if t.epoch == epoch && t.phase == Phase::Migrating {
                    self.start_running(task)?;
                }
            }
            EventKind::TaskCompleted { task, device, version } => {
                let t = &self.tasks[task];
                if self.devices[device].version == version && t.device == Some(device) && t.phase == Phase::Running {
                    self.complete(task, device)?;
                }
            }
            EventKind::UtilisationChanged { device, native, scripted } => {
                self.change_utilisation(device, native)?;
                if !scripted && self.active() {
                    self.schedule_fluctuation(device);
                }
            }
            EventKind::DeadlineChanged { task, factor } => self.change_deadline(task, factor)?,
            EventKind::ReservationRotated => {
                self.rotate_reservations();
                if self.active() {
                    self.queue.push(
                        self.now + self.cfg.scenario.reservation_window_s,
                        EventKind::ReservationRotated,
                    );
                }
            }
        }
        Ok(())
    }

    // ---- links and legs ----

    fn throughput(&self, d: usize) -> f64 {
        scoring::throughput_by_distance(self.devices[d].node(), self.cfg.scoring.throughput_mode).unwrap_or(1.0)
    }

    fn user_link(&self, d: usize, sharing: u32) -> NetworkLink {
        let n = &self.cfg.network;
        let node = self.devices[d].node();
        NetworkLink {
            sharing_users: sharing.max(1),
            medium_throughput: self.throughput(d).clamp(0.01, 1.0),
            queuing_delay: n.queuing_delay_s,
            processing_delay: n.processing_delay_s,
            propagation_delay: network::propagation_delay(node.distance / 1000.0, Medium::Microwave),
            const_overhead: n.const_overhead_s,
            ..NetworkLink::symmetric(self.cfg.fleet.device_bandwidth_bps)
        }
    }

    fn transfer(&self, bits: f64, link: NetworkLink) -> Result<f64, EngineError> {
        let bw = network::available_bandwidth(&link).map_err(crate::scoring::ScoringError::from)?;
        let prop = link.propagation_delay;
        let path = NetworkPath::new(vec![link]);
        let hops = network::packetized_delay(bits, &path, self.cfg.network.with_queuing)
            .map_err(crate::scoring::ScoringError::from)?;
        Ok(bits / bw + hops + prop)
    }

    /// User <-> device leg for `bits`, with the device's current sharing.
    fn user_leg(&self, d: usize, bits: f64) -> Result<f64, EngineError> {
        self.transfer(bits, self.user_link(d, self.devices[d].assigned))
    }

    /// Device <-> Fog server status message.
    fn status_leg(&self, cross_cluster: bool) -> Result<f64, EngineError> {
        let n = &self.cfg.network;
        let link = NetworkLink {
            queuing_delay: n.queuing_delay_s,
            processing_delay: n.processing_delay_s,
            const_overhead: n.const_overhead_s,
            ..NetworkLink::symmetric(self.cfg.fleet.server_bandwidth_bps)
        };
        let extra = if cross_cluster { n.inter_cluster_s } else { 0.0 };
        Ok(self.transfer(n.status_message_bytes * 8.0, link)? + extra)
    }

    fn cloud_leg(&self, bits: f64) -> Result<f64, EngineError> {
        let n = &self.cfg.network;
        let link = NetworkLink {
            queuing_delay: n.queuing_delay_s,
            processing_delay: n.processing_delay_s,
            const_overhead: n.const_overhead_s,
            propagation_delay: network::propagation_delay(n.cloud_distance_km, Medium::Wired),
            ..NetworkLink::symmetric(n.cloud_bandwidth_bps)
        };
        self.transfer(bits, link)
    }

    fn response_bits(&self, t: usize) -> f64 {
        self.tasks[t].task.data_size * self.cfg.scenario.response_ratio
    }

    fn cross(&self, t: usize, d: usize) -> bool {
        self.devices[d].node().cluster != self.tasks[t].home
    }

    fn post_estimate(&self, t: usize, d: usize) -> Result<f64, EngineError> {
        let tail = if self.tasks[t].cloud {
            let bits = self.tasks[t].task.data_size;
            self.cloud_leg(bits)? + 2.0 * self.cloud_leg(self.response_bits(t))?
        } else {
            self.user_leg(d, self.response_bits(t))?
        };
        Ok(self.status_leg(self.cross(t, d))? + tail)
    }

    // ---- allocation ----

    /// The allocator's view of device `d`: free share after load and
    /// reservation, and availability with one more running task.
    fn candidate(&self, d: usize) -> Candidate {
        let dev = &self.devices[d];
        let mut node = dev.node().clone();
        node.discharge_rates = vec![dev.setup.discharge_rate; dev.active.len() + 1];
        if !self.reservation {
            node.reservation = Default::default();
        }
        let mut util = BTreeMap::new();
        util.insert(node.id, dev.busy_fraction().min(1.0));
        let mut one = [node];
        policy::reserve(&mut one, &util);
        let [mut node] = one;
        node.free_resource_fraction = node.free_resource_fraction.max(1e-3);
        Candidate {
            node,
            link: self.user_link(d, dev.assigned + 1),
        }
    }

    fn choose(&self, task: &Task, idxs: &[usize]) -> Result<usize, EngineError> {
        let cands: Vec<Candidate> = idxs.iter().map(|&d| self.candidate(d)).collect();
        let id = match self.policy {
            Policy::Mc => policy::mc_allocate(task, &cands, RequestKind::Fresh, &self.cfg.scoring)?
                .and_then(|v| v.first().map(|c| c.node_id)),
            Policy::Baseline => policy::baseline_allocate(task, &cands)?.first().map(|r| r.node_id),
        };
        let id = id.expect("candidate list is never empty");
        Ok(idxs[cands.iter().position(|c| c.node.id == id).unwrap()])
    }

    fn place_fresh(&mut self, t: usize) -> Result<(), EngineError> {
        let (home, demand) = (self.tasks[t].home, self.tasks[t].demand);
        let in_home: Vec<usize> = (0..self.devices.len())
            .filter(|&d| self.devices[d].node().cluster == home)
            .collect();
        let mut idxs: Vec<usize> = in_home
            .iter()
            .copied()
            .filter(|&d| self.devices[d].spare_mips() >= demand)
            .collect();
        let mut peer = false;
        if idxs.is_empty() {
            for d in 0..self.devices.len() {
                if self.devices[d].node().cluster != home && self.peer_admits(d, demand) {
                    idxs.push(d);
                }
            }
            peer = !idxs.is_empty();
        }
        if idxs.is_empty() {
            idxs = if in_home.is_empty() { (0..self.devices.len()).collect() } else { in_home };
        }
        let d = self.choose(&self.tasks[t].task, &idxs)?;
        if peer {
            self.stats.peer_placements += 1;
        }
        self.assign(t, d, !peer)
    }

    fn peer_admits(&mut self, d: usize, demand: f64) -> bool {
        let dev = &self.devices[d];
        let ok = if self.reservation {
            policy::reservation_gate(dev.node(), dev.busy_fraction(), demand)
        } else {
            dev.spare_mips() >= demand
        };
        if ok {
            self.stats.peer_admissions += 1;
            let node = dev.node();
            let reserved = if self.reservation { node.reservation.required_reservation } else { 0.0 };
            if node.cpu_capacity * (1.0 - dev.busy_fraction()) - reserved >= demand - 1e-9 {
                self.stats.gated_admissions += 1;
            }
        }
        ok
    }

    fn claim(&mut self, t: usize, d: usize) {
        let dev = &mut self.devices[d];
        dev.committed += self.tasks[t].demand;
        dev.assigned += 1;
    }

    fn release(&mut self, t: usize, d: usize) {
        let dev = &mut self.devices[d];
        dev.committed = (dev.committed - self.tasks[t].demand).max(0.0);
        dev.assigned = dev.assigned.saturating_sub(1);
        dev.active.retain(|&x| x != t);
    }

    fn assign(&mut self, t: usize, d: usize, home_request: bool) -> Result<(), EngineError> {
        self.claim(t, d);
        if home_request {
            let demand = self.tasks[t].demand;
            let dev = &mut self.devices[d];
            dev.window.push(demand);
            dev.last_request = demand;
        }
        let up = self.user_leg(d, self.tasks[t].task.data_size)?;
        let reg = self.status_leg(self.cross(t, d))?;
        let post = self.post_estimate(t, d)?;
        let id = self.devices[d].node().id;
        let run = &mut self.tasks[t];
        run.counters.user_time += up;
        run.counters.user_packets += 1;
        run.counters.internal_fog_time += reg;
        run.counters.internal_fog_packets += 1;
        run.post_estimate = post;
        run.phase = Phase::Transit;
        run.device = Some(d);
        run.placements.push(id);
        run.epoch += 1;
        let epoch = run.epoch;
        self.queue
            .push(self.now + up + reg, EventKind::TaskStarted { task: t, epoch });
        Ok(())
    }

    // ---- execution ----

    fn advance(&mut self, d: usize) {
        let dt = self.now - self.devices[d].last_update;
        if dt > 0.0 {
            let active = self.devices[d].active.clone();
            for &t in &active {
                let run = &mut self.tasks[t];
                run.task.completed_work = (run.task.completed_work + run.rate * dt).min(run.task.length);
                run.counters.device_processing_time += dt;
            }
            let dev = &mut self.devices[d];
            let drain = dev.setup.discharge_rate * active.len() as f64 * dt / 60.0;
            dev.setup.node.battery_charge = (dev.setup.node.battery_charge - drain).max(0.0);
        }
        self.devices[d].last_update = self.now;
    }

    fn reschedule(&mut self, d: usize) {
        let derate = {
            let node = self.devices[d].node();
            (node.caf_score * self.throughput(d)).clamp(1e-2, 1.0)
        };
        let dev = &mut self.devices[d];
        dev.version += 1;
        let n = dev.active.len();
        if n == 0 {
            return;
        }
        let node = &dev.setup.node;
        let free = node.cpu_capacity * (1.0 - node.native_utilisation);
        let rate = free / n as f64 * derate;
        self.stats.capacity_checks += 1;
        if rate * n as f64 + node.native_utilisation * node.cpu_capacity > node.cpu_capacity * (1.0 + 1e-9) {
            self.stats.capacity_violations += 1;
        }
        let version = dev.version;
        for &t in &dev.active {
            let run = &mut self.tasks[t];
            run.rate = rate;
            let left = (run.task.length - run.task.completed_work).max(0.0);
            self.queue.push(
                self.now + left / rate,
                EventKind::TaskCompleted {
                    task: t,
                    device: d,
                    version,
                },
            );
        }
    }

    fn start_running(&mut self, t: usize) -> Result<(), EngineError> {
        let d = self.tasks[t].device.expect("placed task has a device");
        self.advance(d);
        self.tasks[t].phase = Phase::Running;
        self.devices[d].active.push(t);
        self.reschedule(d);
        if std::mem::take(&mut self.tasks[t].recheck) {
            self.monitor(t)?;
        }
        Ok(())
    }

    fn complete(&mut self, t: usize, d: usize) -> Result<(), EngineError> {
        self.advance(d);
        let cross = self.cross(t, d);
        let internal = self.status_leg(cross)?;
        let (tail, cloud_up, cloud_down, fog_down) = if self.tasks[t].cloud {
            let up = self.cloud_leg(self.tasks[t].task.data_size)?;
            let down = self.cloud_leg(self.response_bits(t))?;
            (up + 2.0 * down, up, down, 0.0)
        } else {
            let down = self.user_leg(d, self.response_bits(t))?;
            (down, 0.0, 0.0, down)
        };
        self.release(t, d);
        self.reschedule(d);

        let finish = self.now + internal + tail;
        let run = &mut self.tasks[t];
        run.task.completed_work = run.task.length;
        run.phase = Phase::Done;
        run.finish = finish;
        let c = &mut run.counters;
        c.internal_fog_response_time += internal;
        c.internal_response_packets += 1;
        if run.cloud {
            c.cloud_time += cloud_up;
            c.cloud_response_time += cloud_down;
            c.cloud_packets += 1;
            c.cloud_response_packets += 1;
        } else {
            c.fog_response_time += fog_down;
            c.fog_response_packets += 1;
        }
        self.stats.completed_work += run.task.length;
        self.outstanding -= 1;
        self.records.push(RequestRecord {
            task: run.task.id,
            app: run.task.app_id,
            submit_time: run.task.submit_time,
            finish_time: finish,
            deadline: run.deadline_abs - run.task.submit_time,
            counters: run.counters.clone(),
        });
        Ok(())
    }

    // ---- dynamics ----

    fn change_utilisation(&mut self, d: usize, native: f64) -> Result<(), EngineError> {
        self.advance(d);
        let hist_len = self.cfg.fleet.history_len;
        let caf_range = self.cfg.fleet.caf_range;
        let dev = &mut self.devices[d];
        let node = &mut dev.setup.node;
        node.native_utilisation = native;
        node.free_resource_fraction = 1.0 - native;
        node.fluctuation_history.push(1.0 - native);
        if node.fluctuation_history.len() > hist_len {
            let extra = node.fluctuation_history.len() - hist_len;
            node.fluctuation_history.drain(..extra);
        }
        node.caf_score = dev
            .setup
            .fixed_caf
            .unwrap_or_else(|| caf_for(&node.fluctuation_history, caf_range));
        self.trace.push(UtilisationTrace {
            time: self.now,
            device: node.id,
            native_utilisation: native,
        });
        self.reschedule(d);
        if self.policy == Policy::Mc {
            for t in self.devices[d].active.clone() {
                self.monitor(t)?;
            }
        }
        Ok(())
    }

    fn change_deadline(&mut self, t: usize, factor: f64) -> Result<(), EngineError> {
        if matches!(self.tasks[t].phase, Phase::Done | Phase::Pending) {
            return Ok(());
        }
        let floor = self.cfg.scenario.min_remaining_deadline_s;
        let run = &mut self.tasks[t];
        let left = ((run.deadline_abs - self.now) * factor).max(floor);
        run.deadline_abs = self.now + left;
        run.task.deadline = run.deadline_abs - run.task.submit_time;
        self.stats.deadline_changes += 1;
        if self.policy == Policy::Mc {
            if run.phase == Phase::Running {
                self.monitor(t)?;
            } else {
                run.recheck = true;
            }
        }
        Ok(())
    }

    /// Checks whether a running task will still meet its deadline where it
    /// is and tries to move it if not.
    fn monitor(&mut self, t: usize) -> Result<(), EngineError> {
        let run = &self.tasks[t];
        if run.phase != Phase::Running {
            return Ok(());
        }
        let d = run.device.expect("running task has a device");
        self.advance(d);
        let run = &self.tasks[t];
        let left_work = run.task.length - run.task.completed_work;
        let projected = self.now + left_work / run.rate + run.post_estimate;
        if projected <= run.deadline_abs || run.migrations >= self.cfg.scenario.max_migrations_per_task {
            return Ok(());
        }
        let budget = run.deadline_abs - self.now - run.post_estimate;
        self.try_migrate(t, d, budget)
    }

    fn try_migrate(&mut self, t: usize, from: usize, budget: f64) -> Result<(), EngineError> {
        let sub = self.cfg.scenario.subtask_length_mi;
        let mut snapshot = self.tasks[t].task.clone();
        snapshot.completed_work = (snapshot.completed_work / sub).floor() * sub;
        let others: Vec<usize> = (0..self.devices.len()).filter(|&d| d != from).collect();
        let cands: Vec<Candidate> = others.iter().map(|&d| self.candidate(d)).collect();
        let decision = policy::handle_deadline_change(
            &snapshot,
            budget,
            None,
            &cands,
            &self.cfg.scoring,
            self.cfg.scenario.feasibility,
        )?;
        match decision {
            DeadlineDecision::Stay => {}
            DeadlineDecision::Violation => {
                if !self.tasks[t].flagged {
                    self.tasks[t].flagged = true;
                    self.stats.violation_flags += 1;
                }
            }
            DeadlineDecision::Migrate(card) => {
                let to = others[cands.iter().position(|c| c.node.id == card.node_id).unwrap()];
                self.release(t, from);
                self.reschedule(from);
                self.claim(t, to);
                let cross = self.devices[from].node().cluster != self.devices[to].node().cluster;
                let moving = card.migration_time + if cross { self.cfg.network.inter_cluster_s } else { 0.0 };
                let post = self.post_estimate(t, to)?;
                let run = &mut self.tasks[t];
                run.task.completed_work = snapshot.completed_work;
                run.counters.internal_fog_time += moving;
                run.counters.internal_fog_packets += 1;
                run.migrations += 1;
                run.post_estimate = post;
                run.phase = Phase::Migrating;
                run.device = Some(to);
                run.placements.push(card.node_id);
                run.epoch += 1;
                let epoch = run.epoch;
                self.stats.migrations += 1;
                self.queue
                    .push(self.now + moving, EventKind::MigrationCompleted { task: t, epoch });
            }
        }
        Ok(())
    }

    fn rotate_reservations(&mut self) {
        for dev in &mut self.devices {
            let r = &mut dev.setup.node.reservation;
            r.reserved_value = policy::window_volume(&dev.window);
            r.total_apps_processed = dev.window.len() as u32;
            r.last_app_request = dev.last_request;
            r.required_reservation = policy::required_reservation(r);
            dev.window.clear();
        }
    }

    fn finish(mut self) -> Result<RunOutput, EngineError> {
        self.records.sort_by_key(|r| r.task);
        let prices = &self.cfg.prices;
        let at_cost = self
            .workload
            .ledgers
            .iter()
            .map(|l| pricing::total_app_cost(l, prices))
            .collect::<Result<Vec<f64>, _>>()?;
        let mut report = metrics::summarize(&self.records, &self.cfg.sla);
        report.policy = self.policy.to_string();
        report.reservation = self.reservation;
        report.total_cost = at_cost.iter().fold(0.0, |a, b| a + b);
        let s = &self.cfg.scenario;
        let (tc_req, tc) = metrics::cost_metrics(&self.records, |app| {
            let at = at_cost[app.0 as usize];
            (s.fog_unit_cost.unwrap_or(at), s.cloud_unit_cost.unwrap_or(at))
        });
        report.tc_req = tc_req;
        report.tc = tc;
        report.migrations = self.stats.migrations;
        report.peer_placements = self.stats.peer_placements;
        let outcomes = self
            .tasks
            .iter()
            .map(|r| TaskOutcome {
                task: r.task.id,
                placements: r.placements.clone(),
                finish_time: r.finish,
                flagged: r.flagged,
                violated: r.finish > r.deadline_abs,
            })
            .collect();
        Ok(RunOutput {
            report,
            records: self.records,
            outcomes,
            stats: self.stats,
            utilisation_trace: self.trace,
        })
    }
}

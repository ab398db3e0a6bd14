//! Workload generation, deadline-change plans and per-application usage
//! ledgers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{stream, Scenario, DEADLINE_STREAM, WORKLOAD_STREAM};
use crate::config::{Config, Range, ScenarioSection};
use crate::model::{AppId, Application, Task, TaskId, Tier, UsageLedger};

pub(crate) fn uniform(rng: &mut impl Rng, r: Range) -> f64 {
    r.lo + (r.hi - r.lo) * rng.gen::<f64>()
}

fn weighted(rng: &mut impl Rng, weights: &[f64]) -> u32 {
    let total: f64 = weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i as u32;
        }
        x -= w;
    }
    (weights.len() - 1) as u32
}

/// Applications plus the per-task flags and per-application ledgers the
/// engine needs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Workload {
    pub apps: Vec<Application>,
    /// Indexed by task id: results are also stored in the Cloud.
    pub cloud: Vec<bool>,
    /// Indexed by application id.
    pub ledgers: Vec<UsageLedger>,
}

impl Workload {
    pub fn task_count(&self) -> usize {
        self.cloud.len()
    }
}

/// The applications of a scenario, generated from its workload stream or
/// taken from an explicit task list.
pub fn generate_workload(scenario: &Scenario) -> Vec<Application> {
    build(&scenario.config).apps
}

pub(crate) fn build(cfg: &Config) -> Workload {
    let mut w = match &cfg.workload {
        Some(explicit) => from_tasks(cfg, explicit),
        None => generated(cfg),
    };
    w.ledgers = w.apps.iter().map(|a| ledger(cfg, a, &w.cloud)).collect();
    w
}

fn generated(cfg: &Config) -> Workload {
    let s = &cfg.scenario;
    let mut rng = stream(s.seed, WORKLOAD_STREAM);
    let mut w = Workload::default();
    let mut next_task = 0u32;
    for a in 0..s.app_count {
        let submit = uniform(&mut rng, Range::new(0.0, s.arrival_window_s));
        let home = weighted(&mut rng, &s.cluster_weights);
        let mut tasks = Vec::with_capacity(s.tasks_per_app as usize);
        for _ in 0..s.tasks_per_app {
            let bytes = uniform(&mut rng, s.data_size_bytes);
            let deadline = uniform(&mut rng, s.deadline_s).max(s.min_deadline_s);
            let mut t = Task::new(next_task, s.task_length_mi, bytes * 8.0, deadline);
            t.app_id = AppId(a);
            t.submit_time = submit;
            tasks.push(t);
            w.cloud.push(rng.gen::<f64>() < s.cloud_fraction);
            next_task += 1;
        }
        w.apps.push(Application {
            id: AppId(a),
            user_id: a,
            home_cluster: home,
            tasks,
            deadline_variation: s.deadline_variation_pct,
            submit_time: submit,
        });
    }
    w
}

fn from_tasks(cfg: &Config, explicit: &crate::config::WorkloadSection) -> Workload {
    let mut w = Workload::default();
    for (i, spec) in explicit.tasks.iter().enumerate() {
        let pos = match w.apps.iter().position(|a| a.user_id == spec.app) {
            Some(p) => p,
            None => {
                w.apps.push(Application {
                    id: AppId(w.apps.len() as u32),
                    user_id: spec.app,
                    home_cluster: spec.cluster,
                    tasks: Vec::new(),
                    deadline_variation: cfg.scenario.deadline_variation_pct,
                    submit_time: spec.submit_s,
                });
                w.apps.len() - 1
            }
        };
        let app = &mut w.apps[pos];
        let mut t = Task::new(i as u32, spec.length_mi, spec.data_size_bytes * 8.0, spec.deadline_s);
        t.app_id = app.id;
        t.submit_time = app.submit_time;
        app.tasks.push(t);
        w.cloud.push(spec.cloud);
    }
    // task ids follow application order so they index `cloud` directly
    let mut cloud = Vec::with_capacity(w.cloud.len());
    let mut next = 0u32;
    for app in &mut w.apps {
        for t in &mut app.tasks {
            cloud.push(w.cloud[t.id.0 as usize]);
            t.id = TaskId(next);
            next += 1;
        }
    }
    w.cloud = cloud;
    w
}

/// Usage billed for an application: device connectivity for the upload,
/// request and response messages, one rule execution per task, and Cloud
/// traffic for tasks whose results are stored there. Depends only on the
/// workload, not on where tasks run.
fn ledger(cfg: &Config, app: &Application, cloud: &[bool]) -> UsageLedger {
    let mut l = UsageLedger::default();
    for t in &app.tasks {
        let kb = t.data_size / 8.0 / 1024.0;
        let resp_kb = kb * cfg.scenario.response_ratio;
        l.add_connectivity(Tier::FogDevice, t.data_size / cfg.fleet.device_bandwidth_bps / 60.0);
        l.add_messages(Tier::FogDevice, kb, 1);
        l.add_messages(Tier::FogDevice, resp_kb, 1);
        l.add_processing(Tier::FogDevice, kb, 1);
        if cloud[t.id.0 as usize] {
            l.add_connectivity(Tier::Cloud, t.data_size / cfg.network.cloud_bandwidth_bps / 60.0);
            l.add_messages(Tier::Cloud, kb, 1);
        }
    }
    l
}

/// A scheduled change to one task's deadline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeadlineChange {
    pub task: TaskId,
    /// Absolute simulation time, s.
    pub time: f64,
    /// Multiplier applied to the time left until the deadline.
    pub factor: f64,
}

/// Deadline changes for `app`: each task gets up to
/// `max_deadline_changes_per_task` changes, each with the configured
/// probability, at a random point within its original deadline, scaling
/// the remaining time by a factor in `1 +/- variation_pct / 100`.
pub fn deadline_change_process(
    app: &Application,
    variation_pct: f64,
    rng: &mut impl Rng,
    s: &ScenarioSection,
) -> Vec<DeadlineChange> {
    let mut out = Vec::new();
    if variation_pct <= 0.0 {
        return out;
    }
    let v = variation_pct / 100.0;
    for t in &app.tasks {
        for _ in 0..s.max_deadline_changes_per_task {
            let fire = rng.gen::<f64>() < s.deadline_change_probability;
            let at = uniform(rng, Range::new(0.1, 0.9));
            let factor = 1.0 + v * uniform(rng, Range::new(-1.0, 1.0));
            if fire {
                out.push(DeadlineChange {
                    task: t.id,
                    time: app.submit_time + at * t.deadline,
                    factor,
                });
            }
        }
    }
    out.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.task.cmp(&b.task)));
    out
}

/// Deadline changes for the whole workload from the scenario's deadline
/// stream.
pub(crate) fn deadline_plan(cfg: &Config, w: &Workload) -> Vec<DeadlineChange> {
    let mut rng = stream(cfg.scenario.seed, DEADLINE_STREAM);
    w.apps
        .iter()
        .flat_map(|a| deadline_change_process(a, a.deadline_variation, &mut rng, &cfg.scenario))
        .collect()
}

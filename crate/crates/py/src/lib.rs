//! Python bindings. Plain data (score cards, reports, ledgers, price books)
//! crosses the boundary as dicts; tasks and nodes are classes.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::de::DeserializeOwned;
use serde::Serialize;

use fogsim_core::config::Config;
use fogsim_core::engine::{self, Scenario};
use fogsim_core::fixtures;
use fogsim_core::model::{FogNode, NetworkLink, NodeId, PriceBook, Task, UsageLedger};
use fogsim_core::policy::{self, Candidate, DeadlineDecision, Feasibility, Policy, RequestKind};
use fogsim_core::pricing;
use fogsim_core::scoring::{self, ScoringConfig};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = PyModule::import(obj.py(), "json")?
        .call_method1("dumps", (obj,))?
        .extract()?;
    serde_json::from_str(&text).map_err(err)
}

#[pyclass(name = "Task", skip_from_py_object)]
#[derive(Clone)]
struct PyTask {
    inner: Task,
}

#[pymethods]
impl PyTask {
    /// `length` in MI, `data_size` in bits, `deadline` in seconds.
    #[new]
    fn new(id: u32, length: f64, data_size: f64, deadline: f64) -> Self {
        Self {
            inner: Task::new(id, length, data_size, deadline),
        }
    }

    #[getter]
    fn id(&self) -> u32 {
        self.inner.id.0
    }
    #[getter]
    fn length(&self) -> f64 {
        self.inner.length
    }
    #[setter]
    fn set_length(&mut self, v: f64) {
        self.inner.length = v;
    }
    #[getter]
    fn completed_work(&self) -> f64 {
        self.inner.completed_work
    }
    #[setter]
    fn set_completed_work(&mut self, v: f64) {
        self.inner.completed_work = v;
    }
    #[getter]
    fn data_size(&self) -> f64 {
        self.inner.data_size
    }
    #[setter]
    fn set_data_size(&mut self, v: f64) {
        self.inner.data_size = v;
    }
    #[getter]
    fn deadline(&self) -> f64 {
        self.inner.deadline
    }
    #[setter]
    fn set_deadline(&mut self, v: f64) {
        self.inner.deadline = v;
    }

    fn remaining(&self) -> f64 {
        self.inner.remaining()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Task(id={}, length={}, data_size={}, deadline={})",
            self.inner.id.0, self.inner.length, self.inner.data_size, self.inner.deadline
        )
    }
}

#[pyclass(name = "FogNode", skip_from_py_object)]
#[derive(Clone)]
struct PyFogNode {
    inner: FogNode,
}

macro_rules! node_fields {
    ($($get:ident / $set:ident : $ty:ty),* $(,)? ; $($rest:item)*) => {
        #[pymethods]
        impl PyFogNode {
            $($rest)*
            $(
                #[getter]
                fn $get(&self) -> $ty {
                    self.inner.$get.clone()
                }
                #[setter]
                fn $set(&mut self, v: $ty) {
                    self.inner.$get = v;
                }
            )*
        }
    };
}

node_fields! {
    cluster / set_cluster: u32,
    cpu_capacity / set_cpu_capacity: f64,
    free_resource_fraction / set_free_resource_fraction: f64,
    native_utilisation / set_native_utilisation: f64,
    battery_charge / set_battery_charge: f64,
    discharge_rates / set_discharge_rates: Vec<f64>,
    mains_powered / set_mains_powered: bool,
    distance / set_distance: f64,
    max_supported_distance / set_max_supported_distance: f64,
    fluctuation_history / set_fluctuation_history: Vec<f64>,
    caf_score / set_caf_score: f64;

    /// A battery-powered Fog device with `cpu_capacity` MIPS, fully free.
    #[new]
    fn new(id: u32, cpu_capacity: f64) -> Self {
        Self {
            inner: FogNode::device(id, cpu_capacity),
        }
    }

    #[getter]
    fn id(&self) -> u32 {
        self.inner.id.0
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "FogNode(id={}, cpu_capacity={}, free_resource_fraction={})",
            self.inner.id.0, self.inner.cpu_capacity, self.inner.free_resource_fraction
        )
    }
}

fn candidates(nodes: &[PyRef<'_, PyFogNode>], bandwidth: f64) -> Vec<Candidate> {
    nodes
        .iter()
        .map(|n| Candidate {
            node: n.inner.clone(),
            link: NetworkLink::symmetric(bandwidth),
        })
        .collect()
}

fn feasibility(strict: bool) -> Feasibility {
    if strict {
        Feasibility::Strict
    } else {
        Feasibility::Literal
    }
}

/// Score card of `task` on `node` over a symmetric link of `bandwidth` bits/s.
#[pyfunction]
#[pyo3(signature = (task, node, bandwidth = 1e5))]
fn score_device<'py>(
    py: Python<'py>,
    task: PyRef<'py, PyTask>,
    node: PyRef<'py, PyFogNode>,
    bandwidth: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let card = scoring::score_device(
        &task.inner,
        &node.inner,
        &NetworkLink::symmetric(bandwidth),
        &ScoringConfig::default(),
    )
    .map_err(err)?;
    to_py(py, &card)
}

/// Score cards sorted by completion time. With `migration_deadline` set, only
/// nodes that can finish within it are kept. Returns None for no nodes.
#[pyfunction]
#[pyo3(signature = (task, nodes, bandwidth = 1e5, migration_deadline = None, strict = false))]
fn mc_allocate<'py>(
    py: Python<'py>,
    task: PyRef<'py, PyTask>,
    nodes: Vec<PyRef<'py, PyFogNode>>,
    bandwidth: f64,
    migration_deadline: Option<f64>,
    strict: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = match migration_deadline {
        None => RequestKind::Fresh,
        Some(deadline) => RequestKind::Migration {
            deadline,
            feasibility: feasibility(strict),
        },
    };
    let cards = policy::mc_allocate(&task.inner, &candidates(&nodes, bandwidth), kind, &ScoringConfig::default())
        .map_err(err)?;
    to_py(py, &cards)
}

/// Node ids ranked by raw processing time plus round trip.
#[pyfunction]
#[pyo3(signature = (task, nodes, bandwidth = 1e5))]
fn baseline_allocate(task: PyRef<'_, PyTask>, nodes: Vec<PyRef<'_, PyFogNode>>, bandwidth: f64) -> PyResult<Vec<u32>> {
    let ranks = policy::baseline_allocate(&task.inner, &candidates(&nodes, bandwidth)).map_err(err)?;
    Ok(ranks.into_iter().map(|r| r.node_id.0).collect())
}

/// Returns `("stay", None)`, `("migrate", card)` or `("violation", None)`.
#[pyfunction]
#[pyo3(signature = (task, new_deadline, current, nodes, bandwidth = 1e5, strict = false))]
fn handle_deadline_change<'py>(
    py: Python<'py>,
    task: PyRef<'py, PyTask>,
    new_deadline: f64,
    current: Option<u32>,
    nodes: Vec<PyRef<'py, PyFogNode>>,
    bandwidth: f64,
    strict: bool,
) -> PyResult<(&'static str, Bound<'py, PyAny>)> {
    let decision = policy::handle_deadline_change(
        &task.inner,
        new_deadline,
        current.map(NodeId),
        &candidates(&nodes, bandwidth),
        &ScoringConfig::default(),
        feasibility(strict),
    )
    .map_err(err)?;
    Ok(match decision {
        DeadlineDecision::Stay => ("stay", py.None().into_bound(py)),
        DeadlineDecision::Migrate(card) => ("migrate", to_py(py, &card)?),
        DeadlineDecision::Violation => ("violation", py.None().into_bound(py)),
    })
}

/// AT_cost of a usage ledger dict; `prices` defaults to the built-in book.
#[pyfunction]
#[pyo3(signature = (ledger, prices = None))]
fn total_app_cost(ledger: &Bound<'_, PyAny>, prices: Option<&Bound<'_, PyAny>>) -> PyResult<f64> {
    let ledger: UsageLedger = from_py(ledger)?;
    let prices: PriceBook = match prices {
        Some(p) => from_py(p)?,
        None => PriceBook::default(),
    };
    pricing::total_app_cost(&ledger, &prices).map_err(err)
}

/// The default price book as a dict.
#[pyfunction]
fn default_prices(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &PriceBook::default())
}

/// Runs one scenario from TOML text. Returns a dict with `report`,
/// `records`, `outcomes`, `stats` and `utilisation_trace`.
#[pyfunction]
#[pyo3(signature = (config_toml, policy = "mc", reservation = false))]
fn run<'py>(py: Python<'py>, config_toml: &str, policy: &str, reservation: bool) -> PyResult<Bound<'py, PyAny>> {
    let config = Config::from_toml(config_toml).map_err(err)?;
    let policy = match policy {
        "mc" => Policy::Mc,
        "baseline" => Policy::Baseline,
        other => return Err(PyValueError::new_err(format!("unknown policy {other:?}"))),
    };
    let scenario = Scenario::new(config, policy, reservation);
    let out = py.detach(|| engine::run(&scenario)).map_err(err)?;
    to_py(py, &out)
}

/// The five-device worked example as `(task, nodes)`.
#[pyfunction]
fn fd_table() -> (PyTask, Vec<PyFogNode>) {
    let (task, cands) = fixtures::fd_table();
    (
        PyTask { inner: task },
        cands.into_iter().map(|c| PyFogNode { inner: c.node }).collect(),
    )
}

#[pymodule]
fn fogsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTask>()?;
    m.add_class::<PyFogNode>()?;
    m.add_function(wrap_pyfunction!(score_device, m)?)?;
    m.add_function(wrap_pyfunction!(mc_allocate, m)?)?;
    m.add_function(wrap_pyfunction!(baseline_allocate, m)?)?;
    m.add_function(wrap_pyfunction!(handle_deadline_change, m)?)?;
    m.add_function(wrap_pyfunction!(total_app_cost, m)?)?;
    m.add_function(wrap_pyfunction!(default_prices, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(fd_table, m)?)?;
    m.add("FD_TABLE_CONFIG", fixtures::FD_TABLE_CONFIG)?;
    m.add("FD_TABLE_SPIKE_CONFIG", fixtures::FD_TABLE_SPIKE_CONFIG)?;
    Ok(())
}

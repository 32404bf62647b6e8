//! Python bindings: graphs, the coloring pipelines, the O-LOCAL solvers and
//! the experiment commands.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use somnus::bni::{bni_solve_with, check_relay_chains, LabelSource};
use somnus::coloring::{
    batched_kw_coloring, h_k_coloring, h_star_coloring, linial_coloring_in, sleeping_kw_coloring,
    ColoringRun, Epsilon,
};
use somnus::dynamic::{random_batches, run_dynamic_experiment, Strategy};
use somnus::graph::{generate_graph, io, Coloring, Graph, GraphFamily, VertexId};
use somnus::harness::{cmd_run, cmd_verify, ExperimentConfig};
use somnus::olocal::{algorithm_a, GreedyColoring, Mis, MisState, OLocalProblem, ProblemKind};
use somnus::sim::{awake_complexity, Metrics, Pipeline, SimConfig};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn sim(strict: bool) -> SimConfig {
    SimConfig {
        strict_delivery: strict,
        ..SimConfig::default()
    }
}

/// Undirected simple graph with integer vertex ids.
#[pyclass(name = "Graph", skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: Graph,
}

#[pymethods]
impl PyGraph {
    /// `n` vertices `1..=n` joined by `edges`.
    #[new]
    #[pyo3(signature = (n, edges = Vec::new()))]
    fn new(n: u32, edges: Vec<(VertexId, VertexId)>) -> PyResult<Self> {
        Ok(PyGraph {
            inner: Graph::from_edges(n, &edges).map_err(err)?,
        })
    }

    /// Deterministic graph of a named family, e.g. `"random"` or `"line-graph-of-random:3"`.
    #[staticmethod]
    #[pyo3(signature = (family, n, dmax, seed = 0))]
    fn generate(family: &str, n: u32, dmax: u32, seed: u64) -> PyResult<Self> {
        let family: GraphFamily = family.parse().map_err(err)?;
        Ok(PyGraph {
            inner: generate_graph(family, n, dmax, seed).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: io::read_graph(text).map_err(err)?,
        })
    }

    fn to_text(&self) -> PyResult<String> {
        io::write_graph(&self.inner).map_err(err)
    }

    fn vertices(&self) -> Vec<VertexId> {
        self.inner.vertices().collect()
    }

    fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.inner.edges().collect()
    }

    fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.inner.neighbors(v).collect()
    }

    fn max_degree(&self) -> usize {
        self.inner.max_degree()
    }

    fn __len__(&self) -> usize {
        self.inner.vertex_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, m={}, max_degree={})",
            self.inner.vertex_count(),
            self.inner.edge_count(),
            self.inner.max_degree()
        )
    }
}

fn metrics_dict<'py>(py: Python<'py>, m: &Metrics) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("max_awake", awake_complexity(m))?;
    d.set_item("clock_rounds", m.clock_rounds)?;
    d.set_item("messages_sent", m.messages_sent)?;
    d.set_item("messages_delivered", m.messages_delivered)?;
    d.set_item("messages_dropped", m.messages_dropped)?;
    d.set_item("max_message_size", m.max_message_size)?;
    let phases: Vec<(String, u64, u64)> = m
        .phases
        .iter()
        .map(|p| (p.name.clone(), p.max_awake(), p.clock_rounds))
        .collect();
    d.set_item("phases", phases)?;
    Ok(d)
}

type ColoringResult<'py> = (BTreeMap<VertexId, u32>, Bound<'py, PyDict>);

fn coloring_result<'py>(py: Python<'py>, run: ColoringRun) -> PyResult<ColoringResult<'py>> {
    Ok((
        run.coloring.as_map().clone(),
        metrics_dict(py, &run.metrics)?,
    ))
}

/// Linial color reduction from ids; returns `(coloring, metrics)`.
#[pyfunction]
#[pyo3(signature = (graph, strict = true))]
fn linial<'py>(py: Python<'py>, graph: &PyGraph, strict: bool) -> PyResult<ColoringResult<'py>> {
    let g = &graph.inner;
    let mut pipeline = Pipeline::new(sim(strict));
    let (c, _) = linial_coloring_in(&mut pipeline, g, g.max_degree() as u64).map_err(err)?;
    Ok((c.as_map().clone(), metrics_dict(py, &pipeline.finish())?))
}

/// Linial coloring then pairwise block merging down to `delta + 1` colors.
#[pyfunction]
#[pyo3(signature = (graph, strict = true))]
fn kw31<'py>(py: Python<'py>, graph: &PyGraph, strict: bool) -> PyResult<ColoringResult<'py>> {
    coloring_result(
        py,
        sleeping_kw_coloring(&graph.inner, &sim(strict)).map_err(err)?,
    )
}

/// Linial coloring then merging `ceil(delta^eps)` blocks at a time.
#[pyfunction]
#[pyo3(signature = (graph, eps = "1/2", strict = true))]
fn batched32<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    eps: &str,
    strict: bool,
) -> PyResult<ColoringResult<'py>> {
    let eps: Epsilon = eps.parse().map_err(err)?;
    coloring_result(
        py,
        batched_kw_coloring(&graph.inner, eps, &sim(strict)).map_err(err)?,
    )
}

/// Defective-coloring cascade with `k` levels, or `log* delta` levels when `k` is omitted.
#[pyfunction]
#[pyo3(signature = (graph, k = None, strict = true))]
fn hstar<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    k: Option<u32>,
    strict: bool,
) -> PyResult<ColoringResult<'py>> {
    let run = match k {
        Some(k) => h_k_coloring(&graph.inner, k, &sim(strict)),
        None => h_star_coloring(&graph.inner, &sim(strict)),
    };
    coloring_result(py, run.map_err(err)?)
}

fn problem_kind(name: &str) -> PyResult<ProblemKind> {
    name.parse().map_err(err)
}

fn mis_map(d: &BTreeMap<VertexId, MisState>) -> BTreeMap<VertexId, bool> {
    d.iter().map(|(&v, s)| (v, *s == MisState::In)).collect()
}

/// Solves `problem` (`"mis"` or `"greedy"`) from a proper coloring given as
/// `{vertex: color}`. MIS decisions are booleans, greedy decisions colors.
#[pyfunction]
#[pyo3(signature = (graph, coloring, problem = "mis", strict = true))]
fn solve<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    coloring: BTreeMap<VertexId, u32>,
    problem: &str,
    strict: bool,
) -> PyResult<(Py<PyAny>, Bound<'py, PyDict>)> {
    let palette = coloring.values().copied().max().unwrap_or(1);
    let c = Coloring::from_map(coloring, palette);
    let g = &graph.inner;
    let config = sim(strict);
    Ok(match problem_kind(problem)? {
        ProblemKind::Mis => {
            let (d, m) = algorithm_a(g, &c, &Mis, &config).map_err(err)?;
            (
                mis_map(&d).into_pyobject(py)?.into_any().unbind(),
                metrics_dict(py, &m)?,
            )
        }
        ProblemKind::GreedyColoring => {
            let (d, m) = algorithm_a(g, &c, &GreedyColoring, &config).map_err(err)?;
            (
                d.into_pyobject(py)?.into_any().unbind(),
                metrics_dict(py, &m)?,
            )
        }
    })
}

/// Bounded-neighborhood-independence solver; returns
/// `(decisions, metrics, decision_log_json)` and raises if a relay chain is missing.
#[pyfunction]
#[pyo3(signature = (graph, problem = "mis", labels = "ids", strict = true))]
fn bni<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    problem: &str,
    labels: &str,
    strict: bool,
) -> PyResult<(Py<PyAny>, Bound<'py, PyDict>, String)> {
    let source: LabelSource = labels.parse().map_err(err)?;
    let g = &graph.inner;
    let config = sim(strict);
    let (decisions, metrics, log, json) = match problem_kind(problem)? {
        ProblemKind::Mis => {
            let run = bni_solve_with(g, source, &Mis, &config).map_err(err)?;
            let json = run.log_json();
            (
                mis_map(&run.decisions)
                    .into_pyobject(py)?
                    .into_any()
                    .unbind(),
                run.metrics,
                run.log,
                json,
            )
        }
        ProblemKind::GreedyColoring => {
            let run = bni_solve_with(g, source, &GreedyColoring, &config).map_err(err)?;
            let json = run.log_json();
            (
                run.decisions.into_pyobject(py)?.into_any().unbind(),
                run.metrics,
                run.log,
                json,
            )
        }
    };
    check_relay_chains(g, &log).map_err(err)?;
    Ok((decisions, metrics_dict(py, &metrics)?, json))
}

/// Whether `decisions` solve `problem` on `graph`.
#[pyfunction]
fn is_valid(
    graph: &PyGraph,
    problem: &str,
    decisions: BTreeMap<VertexId, Bound<'_, PyAny>>,
) -> PyResult<bool> {
    let g = &graph.inner;
    Ok(match problem_kind(problem)? {
        ProblemKind::Mis => {
            let d = decisions
                .into_iter()
                .map(|(v, x)| {
                    Ok((
                        v,
                        if x.extract::<bool>()? {
                            MisState::In
                        } else {
                            MisState::Out
                        },
                    ))
                })
                .collect::<PyResult<BTreeMap<_, _>>>()?;
            Mis.validate(g, &d).is_ok()
        }
        ProblemKind::GreedyColoring => {
            let d = decisions
                .into_iter()
                .map(|(v, x)| Ok((v, x.extract::<u32>()?)))
                .collect::<PyResult<BTreeMap<_, _>>>()?;
            GreedyColoring.validate(g, &d).is_ok()
        }
    })
}

/// Runs a `key = value` experiment config; returns `(csv, all_valid)`.
#[pyfunction]
fn run_config(text: &str) -> PyResult<(String, bool)> {
    let config = ExperimentConfig::parse(text).map_err(err)?;
    let out = cmd_run(&config).map_err(err)?;
    let valid = out.all_valid();
    Ok((out.csv, valid))
}

/// Prepares on `graph`, applies `batches` random batches of `t` events and
/// returns the per-batch CSV report.
#[pyfunction]
#[pyo3(signature = (graph, problem = "mis", strategy = "direct", t = 1, batches = 10, seed = 0))]
fn dynamic(
    graph: &PyGraph,
    problem: &str,
    strategy: &str,
    t: usize,
    batches: usize,
    seed: u64,
) -> PyResult<String> {
    let strategy: Strategy = strategy.parse().map_err(err)?;
    let g = graph.inner.clone();
    let cap = g.max_degree().max(1);
    let list = random_batches(&g, batches, t, cap, seed).map_err(err)?;
    let config = SimConfig::default();
    let report = match problem_kind(problem)? {
        ProblemKind::Mis => {
            run_dynamic_experiment(g, Mis, strategy, &list, &config)
                .map_err(err)?
                .0
        }
        ProblemKind::GreedyColoring => {
            run_dynamic_experiment(g, GreedyColoring, strategy, &list, &config)
                .map_err(err)?
                .0
        }
    };
    Ok(report.to_csv())
}

/// Oracle and invariant suites up to `max_n` vertices; returns `(passed, report)`.
#[pyfunction]
#[pyo3(signature = (max_n = 6))]
fn verify(max_n: usize) -> PyResult<(bool, String)> {
    if max_n > 8 {
        return Err(PyValueError::new_err("max_n must be at most 8"));
    }
    let report = cmd_verify(max_n, &SimConfig::default()).map_err(err)?;
    Ok((report.passed(), report.to_text()))
}

#[pymodule]
fn somnus_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(linial, m)?)?;
    m.add_function(wrap_pyfunction!(kw31, m)?)?;
    m.add_function(wrap_pyfunction!(batched32, m)?)?;
    m.add_function(wrap_pyfunction!(hstar, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(bni, m)?)?;
    m.add_function(wrap_pyfunction!(is_valid, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(dynamic, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

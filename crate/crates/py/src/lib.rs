//! Python bindings: graphs, windows, energies, simulation, classification
//! and absence checks.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use glauberk_core::absence::{all_absent, parse_region, witness_json, AbsenceProblem, DEFAULT_REGION_CAP};
use glauberk_core::analysis::{classify as classify_report, default_radius, estimate_rho, Thresholds};
use glauberk_core::dynamics::{
    energy_csv, events_jsonl, run_replicas, summary_csv, InitialSource, InteractionSource, SimConfig, SimResult,
    Verbosity,
};
use glauberk_core::graph::{self, BoundaryMode, VertexId};
use glauberk_core::model::{self, EnergyDelta, Interactions, SpinState, TemperatureProfile};
use glauberk_core::presets;

create_exception!(glauberk, GlauberkError, PyValueError);

fn err(e: glauberk_core::Error) -> PyErr {
    GlauberkError::new_err(e.to_string())
}

/// A periodic graph given by its unit cell.
#[pyclass(frozen, module = "glauberk")]
struct PeriodicGraph {
    inner: graph::PeriodicGraph,
}

#[pymethods]
impl PeriodicGraph {
    /// cubic1, cubic2, cubic3, hex or example-m.
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        presets::preset(name).map(|inner| PeriodicGraph { inner }).map_err(err)
    }

    #[staticmethod]
    fn gamma(base: &str, ell: usize, m: usize) -> PyResult<Self> {
        presets::gamma_preset(base, ell, m)
            .map(|inner| PeriodicGraph { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn from_spec(text: &str) -> PyResult<Self> {
        graph::load_cell_spec(text).map(|inner| PeriodicGraph { inner }).map_err(err)
    }

    fn to_spec(&self) -> String {
        self.inner.to_spec_text()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn cell_size(&self) -> usize {
        self.inner.cell_size()
    }

    #[getter]
    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees().to_vec()
    }

    #[getter]
    fn max_degree(&self) -> usize {
        self.inner.max_degree()
    }

    /// `(stable, description)`.
    fn k_stable(&self, k: usize) -> PyResult<(bool, String)> {
        let v = graph::check_k_stable(&self.inner, k).map_err(err)?;
        Ok((v.stable, v.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "PeriodicGraph(dim={}, cell_size={}, max_degree={})",
            self.inner.dim(),
            self.inner.cell_size(),
            self.inner.max_degree()
        )
    }
}

fn boundary(s: &str) -> PyResult<BoundaryMode> {
    s.parse().map_err(err)
}

/// A finite window of a periodic graph over half-open cell ranges.
#[pyclass(frozen, module = "glauberk")]
struct Window {
    inner: graph::WindowGraph,
}

#[pymethods]
impl Window {
    #[new]
    #[pyo3(signature = (graph, extent, boundary_mode = "toroidal"))]
    fn new(graph: &PeriodicGraph, extent: Vec<(i64, i64)>, boundary_mode: &str) -> PyResult<Self> {
        let inner = graph::WindowGraph::new(&graph.inner, extent, boundary(boundary_mode)?).map_err(err)?;
        Ok(Window { inner })
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    /// Endpoints of every edge, in edge order.
    fn edges(&self) -> Vec<(u32, u32)> {
        self.inner.edges().iter().map(|e| (e.a, e.b)).collect()
    }

    fn neighbors(&self, v: u32) -> PyResult<Vec<u32>> {
        self.check(v)?;
        Ok(self.inner.neighbors(v).to_vec())
    }

    /// `cell:local` name of a vertex index.
    fn vertex_id(&self, v: u32) -> PyResult<String> {
        self.check(v)?;
        Ok(self.inner.vertex_id(v).to_string())
    }

    fn index_of(&self, id: &str) -> PyResult<u32> {
        let id: VertexId = id.parse().map_err(err)?;
        self.inner.index_of(&id).map_err(err)
    }

    fn distance(&self, u: u32, v: u32) -> PyResult<usize> {
        self.inner.distance(u, v).map_err(err)
    }

    /// Number of connected sets of at most `k` vertices.
    fn count_flip_sets(&self, k: usize) -> usize {
        graph::count_flip_sets(&self.inner, k)
    }

    /// Energy change of flipping `set`.
    fn delta_h(&self, couplings: Vec<i8>, spins: Vec<i8>, set: Vec<u32>) -> PyResult<i32> {
        let (j, s) = self.assignment(couplings, spins)?;
        for &v in &set {
            self.check(v)?;
        }
        model::delta_h(&self.inner, &j, &s, &set).map(|d| d.value()).map_err(err)
    }

    /// `H = -Σ J σσ` over the window.
    fn energy(&self, couplings: Vec<i8>, spins: Vec<i8>) -> PyResult<i64> {
        let (j, s) = self.assignment(couplings, spins)?;
        Ok(model::window_h(&self.inner, &j, &s))
    }

    fn __repr__(&self) -> String {
        format!(
            "Window(vertices={}, edges={}, boundary={:?})",
            self.inner.num_vertices(),
            self.inner.num_edges(),
            self.inner.boundary()
        )
    }
}

impl Window {
    fn check(&self, v: u32) -> PyResult<()> {
        if (v as usize) < self.inner.num_vertices() {
            Ok(())
        } else {
            Err(GlauberkError::new_err(format!("vertex index {v} out of range")))
        }
    }

    fn assignment(&self, couplings: Vec<i8>, spins: Vec<i8>) -> PyResult<(Interactions, SpinState)> {
        if couplings.len() != self.inner.num_edges() || spins.len() != self.inner.num_vertices() {
            return Err(GlauberkError::new_err(format!(
                "need {} couplings and {} spins, got {} and {}",
                self.inner.num_edges(),
                self.inner.num_vertices(),
                couplings.len(),
                spins.len()
            )));
        }
        Ok((Interactions::new(couplings).map_err(err)?, SpinState::new(spins).map_err(err)?))
    }
}

/// Flip rate at a fixed temperature; `temperature = 0` gives 0, ½ or 1.
#[pyfunction]
fn rate(delta: i32, temperature: f64) -> f64 {
    model::rate_at_temperature(EnergyDelta(delta), temperature)
}

/// The outcome of one simulated trajectory.
#[pyclass(frozen, module = "glauberk")]
struct Run {
    inner: SimResult,
}

#[pymethods]
impl Run {
    #[getter]
    fn replica(&self) -> u64 {
        self.inner.meta.replica
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.meta.seed
    }

    #[getter]
    fn couplings(&self) -> Vec<i8> {
        self.inner.interactions.values().to_vec()
    }

    #[getter]
    fn initial(&self) -> Vec<i8> {
        self.inner.initial.values().to_vec()
    }

    #[getter]
    fn state(&self) -> Vec<i8> {
        self.inner.state.values().to_vec()
    }

    #[getter]
    fn energy(&self) -> i64 {
        self.inner.h
    }

    #[getter]
    fn initial_energy(&self) -> i64 {
        self.inner.initial_h
    }

    #[getter]
    fn total_arrivals(&self) -> u64 {
        self.inner.total_arrivals
    }

    #[getter]
    fn total_accepted(&self) -> u64 {
        self.inner.total_accepted
    }

    /// Accepted flips with `Δ > 0` through each vertex.
    #[getter]
    fn n_minus(&self) -> Vec<u64> {
        self.inner.n_minus.clone()
    }

    #[getter]
    fn n_zero(&self) -> Vec<u64> {
        self.inner.n_zero.clone()
    }

    #[getter]
    fn n_plus(&self) -> Vec<u64> {
        self.inner.n_plus.clone()
    }

    #[getter]
    fn last_flip(&self) -> Vec<Option<f64>> {
        self.inner.last_flip.clone()
    }

    #[getter]
    fn t_end(&self) -> f64 {
        self.inner.t_end
    }

    #[getter]
    fn absorbed_at(&self) -> Option<f64> {
        self.inner.absorbed_at
    }

    #[getter]
    fn num_events(&self) -> usize {
        self.inner.events.len()
    }

    fn summary_csv(&self) -> String {
        summary_csv(&self.inner)
    }

    fn energy_csv(&self) -> String {
        energy_csv(&self.inner)
    }

    fn events_jsonl(&self) -> String {
        events_jsonl(&self.inner)
    }

    /// The full configuration as JSON; enough to reproduce the run.
    fn config_json(&self) -> String {
        serde_json::to_string(self.inner.config()).expect("config serializes")
    }
}

/// Runs `replicas` trajectories. `couplings` fixes the interactions
/// (`"figure"` selects the bundled hexagon-chain couplings); otherwise they
/// are drawn with probability `alpha` of +1.
#[pyfunction]
#[pyo3(signature = (
    graph, extent, boundary_mode = "toroidal", k = 1, alpha = 0.5, gamma = 0.5, temperature = "zero",
    t_max = 100.0, seed = 0, replicas = 1, verbosity = "none", couplings = None, stop_when_absorbed = false
))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    graph: &PeriodicGraph,
    extent: Vec<(i64, i64)>,
    boundary_mode: &str,
    k: usize,
    alpha: f64,
    gamma: f64,
    temperature: &str,
    t_max: f64,
    seed: u64,
    replicas: usize,
    verbosity: &str,
    couplings: Option<Bound<'_, PyAny>>,
    stop_when_absorbed: bool,
) -> PyResult<Vec<Run>> {
    let mut cfg = SimConfig::new(graph.inner.clone(), extent, boundary(boundary_mode)?);
    cfg.k = k;
    cfg.initial = InitialSource::Bernoulli { gamma };
    cfg.temperature = temperature.parse::<TemperatureProfile>().map_err(err)?;
    cfg.t_max = t_max;
    cfg.seed = seed;
    cfg.verbosity = verbosity.parse::<Verbosity>().map_err(err)?;
    cfg.stop_when_absorbed = stop_when_absorbed;
    cfg.interactions = match couplings {
        None => InteractionSource::Bernoulli { alpha },
        Some(c) => {
            let values = if let Ok(name) = c.extract::<String>() {
                if name != "figure" {
                    return Err(GlauberkError::new_err(format!("unknown couplings `{name}`")));
                }
                let w = graph::WindowGraph::new(&cfg.graph, cfg.extent.clone(), cfg.boundary).map_err(err)?;
                presets::example_m_interactions(&w).map_err(err)?
            } else {
                Interactions::new(c.extract::<Vec<i8>>()?).map_err(err)?
            };
            InteractionSource::Fixed { values }
        }
    };
    let results = py.detach(|| run_replicas(&cfg, replicas)).map_err(err)?;
    Ok(results.into_iter().map(|inner| Run { inner }).collect())
}

/// Activity fraction over a ball and the fixation-type verdict. Returns a
/// dict with `verdict`, `rho_i`, `rho_f`, `rho_i_std`, `t_cut`, `radius`,
/// `ball_size` and `per_replica`.
#[pyfunction]
#[pyo3(signature = (runs, t_cut = None, center = None, radius = None))]
fn classify<'py>(
    py: Python<'py>,
    runs: Vec<PyRef<'py, Run>>,
    t_cut: Option<f64>,
    center: Option<&str>,
    radius: Option<usize>,
) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    if runs.is_empty() {
        return Err(GlauberkError::new_err("no runs to classify"));
    }
    let results: Vec<&SimResult> = runs.iter().map(|r| &r.inner).collect();
    let first = results[0];
    if results.iter().any(|r| r.meta.config_hash != first.meta.config_hash) {
        return Err(GlauberkError::new_err("runs come from different configurations"));
    }
    let w = first.window();
    let center = match center {
        Some(s) => w.index_of(&s.parse::<VertexId>().map_err(err)?).map_err(err)?,
        None => 0,
    };
    let radius = match radius {
        Some(r) => r,
        None => default_radius(first, center).map_err(err)?,
    };
    let t_cut = t_cut.unwrap_or(first.config().t_max / 2.0);
    // the estimator takes a slice of owned results
    let owned: Vec<SimResult> = results.iter().map(|r| (*r).clone()).collect();
    let report = estimate_rho(&owned, t_cut, center, radius).map_err(err)?;
    let v = classify_report(&report, &Thresholds::default());
    let d = pyo3::types::PyDict::new(py);
    d.set_item("verdict", v.verdict.to_string())?;
    d.set_item("rho_i", v.rho_i)?;
    d.set_item("rho_f", v.rho_f)?;
    d.set_item("rho_i_std", v.rho_i_std)?;
    d.set_item("t_cut", v.t_cut)?;
    d.set_item("radius", radius)?;
    d.set_item("ball_size", report.ball.len())?;
    d.set_item("per_replica", report.per_replica_rho_i)?;
    Ok(d)
}

/// Checks a region file on a window. Returns `(all_absent, checked)` when
/// the file leaves spins free, or `(absent, witness_json)` for a single
/// configuration given by `sigma` lines.
#[pyfunction]
#[pyo3(signature = (window, couplings, region, k = 1))]
fn absence(window: &Window, couplings: Vec<i8>, region: &str, k: usize) -> PyResult<(bool, String)> {
    let w = &window.inner;
    if couplings.len() != w.num_edges() {
        return Err(GlauberkError::new_err(format!("need {} couplings", w.num_edges())));
    }
    let j = Interactions::new(couplings).map_err(err)?;
    let file = parse_region(w, region).map_err(err)?;
    let problem = AbsenceProblem::new(w, &j, &file.region, k, DEFAULT_REGION_CAP).map_err(err)?;
    if file.sigma.is_empty() {
        let report = all_absent(&problem, &file.constraints).map_err(err)?;
        Ok((report.all, report.checked.to_string()))
    } else {
        let res = problem.check(problem.mask_from(&file.sigma).map_err(err)?);
        Ok((res.absent, witness_json(w, &res)))
    }
}

/// The bundled hexagon-chain region, with its couplings on the window
/// `[-2, 4)`.
#[pyfunction]
fn example_m_region() -> PyResult<(Window, Vec<i8>, String)> {
    let g = presets::example_m().map_err(err)?;
    let inner = graph::WindowGraph::new(&g, vec![(-2, 4)], BoundaryMode::Toroidal).map_err(err)?;
    let j = presets::example_m_interactions(&inner).map_err(err)?;
    Ok((Window { inner }, j.values().to_vec(), presets::EXAMPLE_M_REGION.to_string()))
}

#[pymodule]
fn glauberk(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("GlauberkError", m.py().get_type::<GlauberkError>())?;
    m.add_class::<PeriodicGraph>()?;
    m.add_class::<Window>()?;
    m.add_class::<Run>()?;
    m.add_function(wrap_pyfunction!(rate, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(absence, m)?)?;
    m.add_function(wrap_pyfunction!(example_m_region, m)?)?;
    Ok(())
}

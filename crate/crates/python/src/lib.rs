use std::path::PathBuf;

use modrebal::experiments::{run_f_sweep, run_station_sweep, SweepConfig, SweepReport};
use modrebal::fluidsim::{default_step, probe_with_fleet};
use modrebal::model::io::{instance_from_json, instance_to_json, load_instance, save_instance};
use modrebal::{
    compute_imbalance, fleet_sizes, generate_instance, simulate as run_simulation, solve_rebalancing,
    stability_probe, Error, FluidState, GeneratorConfig, History, Matrix, ProbeConfig,
    RebalanceSolution, SimConfig, StationNetwork,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

create_exception!(modrebal, ModrebalError, PyValueError);
create_exception!(modrebal, BetaInfeasibleError, ModrebalError);
create_exception!(modrebal, InsufficientFleetError, ModrebalError);

fn to_py(err: Error) -> PyErr {
    match err {
        Error::BetaInfeasible(_) => BetaInfeasibleError::new_err(err.to_string()),
        Error::InsufficientFleet { .. } => InsufficientFleetError::new_err(err.to_string()),
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        other => ModrebalError::new_err(other.to_string()),
    }
}

fn matrix(rows: Vec<Vec<f64>>, name: &str) -> PyResult<Matrix> {
    Matrix::from_rows(rows).ok_or_else(|| PyValueError::new_err(format!("{name} must be a square matrix")))
}

/// Parses serde JSON into plain Python objects.
fn to_object<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| ModrebalError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

#[pyclass(name = "StationNetwork", module = "modrebal", frozen)]
struct PyNetwork {
    inner: StationNetwork,
}

#[pymethods]
impl PyNetwork {
    #[new]
    #[pyo3(signature = (lam, mu, p, t, f))]
    fn new(lam: Vec<f64>, mu: Vec<f64>, p: Vec<Vec<f64>>, t: Vec<Vec<f64>>, f: Vec<Vec<f64>>) -> PyResult<Self> {
        let inner = StationNetwork::new(lam, mu, matrix(p, "p")?, matrix(t, "T")?, matrix(f, "f")?)
            .map_err(to_py)?;
        Ok(PyNetwork { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyNetwork {
            inner: instance_from_json(text).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PyNetwork {
            inner: load_instance(path).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        instance_to_json(&self.inner).map_err(to_py)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        save_instance(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn lam(&self) -> Vec<f64> {
        self.inner.lambda().to_vec()
    }

    #[getter]
    fn mu(&self) -> Vec<f64> {
        self.inner.mu().to_vec()
    }

    #[getter]
    fn p(&self) -> Vec<Vec<f64>> {
        self.inner.p().to_rows()
    }

    #[getter(T)]
    fn travel_time(&self) -> Vec<Vec<f64>> {
        self.inner.travel_time().to_rows()
    }

    #[getter]
    fn f(&self) -> Vec<Vec<f64>> {
        self.inner.f().to_rows()
    }

    fn with_uniform_f(&self, value: f64) -> PyResult<Self> {
        Ok(PyNetwork {
            inner: self.inner.with_uniform_f(value).map_err(to_py)?,
        })
    }

    /// Per-station imbalance `D_i`.
    fn imbalance(&self) -> Vec<f64> {
        compute_imbalance(&self.inner).as_slice().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("StationNetwork(n={})", self.inner.n())
    }
}

#[pyclass(name = "Solution", module = "modrebal", frozen)]
struct PySolution {
    inner: RebalanceSolution,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn alpha(&self) -> Vec<Vec<f64>> {
        self.inner.assignment.alpha.to_rows()
    }

    #[getter]
    fn beta(&self) -> Vec<Vec<f64>> {
        self.inner.assignment.beta.to_rows()
    }

    #[getter]
    fn v_alpha(&self) -> f64 {
        self.inner.assignment.v_alpha
    }

    #[getter]
    fn r_alpha_beta(&self) -> f64 {
        self.inner.assignment.r_alpha_beta
    }

    #[getter]
    fn objective_alpha(&self) -> f64 {
        self.inner.objective_alpha
    }

    #[getter]
    fn objective_beta(&self) -> f64 {
        self.inner.objective_beta
    }

    #[getter]
    fn ratio(&self) -> f64 {
        self.inner.driver_vehicle_ratio()
    }

    #[getter]
    fn reb_fraction(&self) -> f64 {
        self.inner.rebalancing_fraction()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner).map_err(|e| ModrebalError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(v_alpha={}, r_alpha_beta={})",
            self.inner.assignment.v_alpha, self.inner.assignment.r_alpha_beta
        )
    }
}

#[pyfunction]
#[pyo3(signature = (n, seed, env_size=100.0, lambda_max=0.05, f=1.0, mu_factor=2.0))]
fn generate(n: usize, seed: u64, env_size: f64, lambda_max: f64, f: f64, mu_factor: f64) -> PyResult<PyNetwork> {
    let config = GeneratorConfig {
        env_size,
        lambda_max,
        f,
        mu_factor,
        ..GeneratorConfig::default()
    };
    Ok(PyNetwork {
        inner: generate_instance(n, seed, &config).map_err(to_py)?,
    })
}

/// Solves both rebalancing programs. Raises `BetaInfeasibleError` when
/// taxi willingness cannot cover the driver imbalance.
#[pyfunction]
fn solve(py: Python<'_>, net: &PyNetwork) -> PyResult<PySolution> {
    let inner = py.detach(|| solve_rebalancing(&net.inner)).map_err(to_py)?;
    Ok(PySolution { inner })
}

/// Minimum vehicle and driver totals `(V_alpha, R)` for given rates.
#[pyfunction(name = "fleet_sizes")]
fn py_fleet_sizes(net: &PyNetwork, alpha: Vec<Vec<f64>>, beta: Vec<Vec<f64>>) -> PyResult<(f64, f64)> {
    fleet_sizes(&net.inner, &matrix(alpha, "alpha")?, &matrix(beta, "beta")?).map_err(to_py)
}

/// Runs the fluid model from `(c, v, r)` and returns the sampled trace as a dict.
#[pyfunction]
#[pyo3(signature = (net, alpha, beta, c, v, r, horizon, h=None, sample_every=1, equilibrium_history=false))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    net: &PyNetwork,
    alpha: Vec<Vec<f64>>,
    beta: Vec<Vec<f64>>,
    c: Vec<f64>,
    v: Vec<f64>,
    r: Vec<f64>,
    horizon: f64,
    h: Option<f64>,
    sample_every: usize,
    equilibrium_history: bool,
) -> PyResult<Py<PyAny>> {
    let alpha = matrix(alpha, "alpha")?;
    let beta = matrix(beta, "beta")?;
    let config = SimConfig {
        sample_every,
        history: if equilibrium_history {
            History::Equilibrium
        } else {
            History::Empty
        },
        ..SimConfig::new(h.unwrap_or_else(|| default_step(&net.inner, 0.25)), horizon)
    };
    let state = FluidState::new(c, v, r);
    let trace = py
        .detach(|| run_simulation(&net.inner, &alpha, &beta, state, &config))
        .map_err(to_py)?;
    to_object(py, &trace)
}

/// Stability check near equilibrium. With `vehicles` and `drivers` unset the
/// fleet is sized from the slacks. Returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (net, solution, vehicles=None, drivers=None, slack_v=0.2, slack_r=0.2, perturbation=0.1, h=None, horizon=None, seed=0))]
#[allow(clippy::too_many_arguments)]
fn probe(
    py: Python<'_>,
    net: &PyNetwork,
    solution: &PySolution,
    vehicles: Option<f64>,
    drivers: Option<f64>,
    slack_v: f64,
    slack_r: f64,
    perturbation: f64,
    h: Option<f64>,
    horizon: Option<f64>,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let config = ProbeConfig {
        slack_v,
        slack_r,
        perturbation,
        h,
        horizon,
        seed,
        ..ProbeConfig::default()
    };
    let report = py
        .detach(|| match (vehicles, drivers) {
            (None, None) => stability_probe(&net.inner, &solution.inner, &config),
            (vs, rs) => {
                let a = &solution.inner.assignment;
                probe_with_fleet(
                    &net.inner,
                    a,
                    vs.unwrap_or(a.v_alpha * (1.0 + slack_v)),
                    rs.unwrap_or(a.r_alpha_beta * (1.0 + slack_r)),
                    &config,
                )
            }
        })
        .map_err(to_py)?;
    to_object(py, &report)
}

fn sweep_config(
    sizes: Vec<usize>,
    trials_per_size: usize,
    base_seed: u64,
    f_values: Option<Vec<f64>>,
) -> SweepConfig {
    let default = SweepConfig::default();
    SweepConfig {
        sizes,
        trials_per_size,
        base_seed,
        f_values: f_values.unwrap_or(default.f_values),
        generator: default.generator,
    }
}

fn finish_sweep(
    py: Python<'_>,
    report: SweepReport,
    out_dir: Option<PathBuf>,
    prefix: &str,
    x_label: &str,
) -> PyResult<Py<PyAny>> {
    if let Some(dir) = out_dir {
        report.write_all(&dir, prefix, x_label).map_err(to_py)?;
    }
    to_object(py, &report.rows)
}

/// Station-count sweep. Returns one dict per trial and optionally writes
/// the CSV and plot files to `out_dir`.
#[pyfunction]
#[pyo3(signature = (sizes=vec![10, 25, 50, 100, 200], trials_per_size=20, base_seed=0, out_dir=None))]
fn station_sweep(
    py: Python<'_>,
    sizes: Vec<usize>,
    trials_per_size: usize,
    base_seed: u64,
    out_dir: Option<PathBuf>,
) -> PyResult<Py<PyAny>> {
    let config = sweep_config(sizes, trials_per_size, base_seed, None);
    let report = py.detach(|| run_station_sweep(&config)).map_err(to_py)?;
    finish_sweep(py, report, out_dir, "sweep", "n")
}

/// Taxi-willingness sweep on `n` stations.
#[pyfunction]
#[pyo3(signature = (n=100, f_values=None, trials_per_size=20, base_seed=0, out_dir=None))]
fn f_sweep(
    py: Python<'_>,
    n: usize,
    f_values: Option<Vec<f64>>,
    trials_per_size: usize,
    base_seed: u64,
    out_dir: Option<PathBuf>,
) -> PyResult<Py<PyAny>> {
    let config = sweep_config(vec![n], trials_per_size, base_seed, f_values);
    let report = py.detach(|| run_f_sweep(&config)).map_err(to_py)?;
    finish_sweep(py, report, out_dir, "fsweep", "f")
}

#[pymodule]
#[pyo3(name = "modrebal")]
fn modrebal_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyNetwork>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(py_fleet_sizes, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    m.add_function(wrap_pyfunction!(station_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(f_sweep, m)?)?;
    m.add("ModrebalError", py.get_type::<ModrebalError>())?;
    m.add("BetaInfeasibleError", py.get_type::<BetaInfeasibleError>())?;
    m.add("InsufficientFleetError", py.get_type::<InsufficientFleetError>())?;
    Ok(())
}

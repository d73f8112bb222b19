//! Python bindings: experiment configs, the run/fit/bound/verify pipeline,
//! model parameters, the exact stopping solver and sample summaries.

use engine::error::Error;
use engine::exact::solve_exact;
use engine::experiment::{self, BoundKind, ExperimentConfig, ExperimentResult, FittedCell, ResultRow, VerifyReport};
use engine::models::{self, FundingParams, StoppingParams};
use engine::stats::{self, BoundEstimate};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(
    bsde_bounds,
    TruncationError,
    PyValueError,
    "The truncation condition does not hold."
);

fn to_py(err: Error) -> PyErr {
    match err.root() {
        Error::Truncation { slack, .. } => {
            let e = TruncationError::new_err(err.to_string());
            Python::attach(|py| {
                let _ = e.value(py).setattr("slack", *slack);
            });
            e
        }
        Error::Config(_) | Error::Json(_) | Error::Structure(_) => PyValueError::new_err(err.to_string()),
        _ => PyRuntimeError::new_err(err.to_string()),
    }
}

fn json<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

fn from_json<T: serde::de::DeserializeOwned>(s: &str) -> PyResult<T> {
    serde_json::from_str(s).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyclass(name = "ExperimentConfig", module = "bsde_bounds", skip_from_py_object)]
#[derive(Clone)]
struct PyExperimentConfig {
    inner: ExperimentConfig,
}

#[pymethods]
impl PyExperimentConfig {
    /// Parses and validates a JSON configuration.
    #[new]
    fn new(config: &str) -> PyResult<Self> {
        ExperimentConfig::from_json(config)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.inner)
    }

    /// The configured seed, or the library default.
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed()
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.inner.seed = Some(seed);
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.name()
    }

    #[getter]
    fn k_max(&self) -> usize {
        self.inner.k_max
    }

    #[setter]
    fn set_k_max(&mut self, k: usize) -> PyResult<()> {
        let mut next = self.inner.clone();
        next.k_max = k;
        next.validate().map_err(to_py)?;
        self.inner = next;
        Ok(())
    }

    #[getter(J)]
    fn steps(&self) -> Vec<usize> {
        self.inner.steps.clone()
    }

    #[getter]
    fn rho(&self) -> Vec<f64> {
        self.inner.rho.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "ExperimentConfig(method={:?}, J={:?}, rho={:?}, k_max={}, seed={})",
            self.inner.method.name(),
            self.inner.steps,
            self.inner.rho,
            self.inner.k_max,
            self.inner.seed()
        )
    }
}

#[pyclass(name = "ResultRow", module = "bsde_bounds", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyResultRow {
    inner: ResultRow,
}

#[pymethods]
impl PyResultRow {
    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.name()
    }
    #[getter(J)]
    fn steps(&self) -> usize {
        self.inner.steps
    }
    #[getter]
    fn rho(&self) -> Option<f64> {
        self.inner.rho
    }
    /// `"up"` or `"low"`.
    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.name()
    }
    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }
    #[getter]
    fn mean(&self) -> f64 {
        self.inner.mean
    }
    #[getter]
    fn sd(&self) -> f64 {
        self.inner.sd
    }
    #[getter]
    fn half_width(&self) -> f64 {
        self.inner.half_width
    }
    #[getter]
    fn count(&self) -> usize {
        self.inner.count
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }
    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }
    #[getter]
    fn wall_time(&self) -> f64 {
        self.inner.wall_time
    }

    fn __repr__(&self) -> String {
        let r = &self.inner;
        format!(
            "ResultRow({} J={} rho={:?} {}{} mean={:.6} sd={:.6})",
            r.method.name(),
            r.steps,
            r.rho,
            r.kind.name(),
            r.k,
            r.mean,
            r.sd
        )
    }
}

#[pyclass(name = "ExperimentResult", module = "bsde_bounds", frozen, skip_from_py_object)]
struct PyExperimentResult {
    inner: ExperimentResult,
}

#[pymethods]
impl PyExperimentResult {
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        ExperimentResult::from_json(s)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[getter]
    fn rows(&self) -> Vec<PyResultRow> {
        self.inner
            .rows
            .iter()
            .cloned()
            .map(|inner| PyResultRow { inner })
            .collect()
    }

    #[getter]
    fn config(&self) -> PyExperimentConfig {
        PyExperimentConfig {
            inner: self.inner.config.clone(),
        }
    }

    /// The row for bound `kind` (`"up"`/`"low"`) at depth `k` in the first
    /// matching cell.
    #[pyo3(signature = (kind, k, J=None, rho=None))]
    #[allow(non_snake_case)]
    fn row(&self, kind: &str, k: usize, J: Option<usize>, rho: Option<f64>) -> PyResult<PyResultRow> {
        let kind = match kind {
            "up" => BoundKind::Up,
            "low" => BoundKind::Low,
            other => {
                return Err(PyValueError::new_err(format!(
                    "kind must be 'up' or 'low', got '{other}'"
                )))
            }
        };
        self.inner
            .rows
            .iter()
            .find(|r| {
                r.kind == kind && r.k == k && J.is_none_or(|j| r.steps == j) && rho.is_none_or(|p| r.rho == Some(p))
            })
            .map(|r| PyResultRow { inner: r.clone() })
            .ok_or_else(|| PyValueError::new_err("no matching row"))
    }

    /// Fitted input approximations, one JSON object per grid cell.
    fn fits_json(&self) -> PyResult<String> {
        json(&self.inner.fits)
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.inner.rows.len()
    }
}

#[pyclass(name = "VerifyReport", module = "bsde_bounds", frozen, skip_from_py_object)]
struct PyVerifyReport {
    inner: VerifyReport,
}

#[pymethods]
impl PyVerifyReport {
    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    /// `(name, passed, detail)` per check.
    #[getter]
    fn checks(&self) -> Vec<(String, bool, String)> {
        self.inner
            .checks
            .iter()
            .map(|c| (c.name.clone(), c.passed, c.detail.clone()))
            .collect()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

#[pyclass(name = "BoundEstimate", module = "bsde_bounds", frozen, skip_from_py_object)]
struct PyBoundEstimate {
    inner: BoundEstimate,
}

#[pymethods]
impl PyBoundEstimate {
    #[getter]
    fn mean(&self) -> f64 {
        self.inner.mean
    }
    #[getter]
    fn sd(&self) -> f64 {
        self.inner.sd
    }
    #[getter]
    fn count(&self) -> usize {
        self.inner.count
    }
    #[getter]
    fn half_width(&self) -> f64 {
        self.inner.half_width
    }
    #[getter]
    fn std_error(&self) -> f64 {
        self.inner.std_error()
    }
    #[getter]
    fn digest(&self) -> &str {
        &self.inner.digest
    }

    fn __repr__(&self) -> String {
        format!(
            "BoundEstimate(mean={}, sd={}, count={}, half_width={})",
            self.inner.mean, self.inner.sd, self.inner.count, self.inner.half_width
        )
    }
}

#[pyclass(name = "FundingParams", module = "bsde_bounds", skip_from_py_object)]
#[derive(Clone)]
struct PyFundingParams {
    inner: FundingParams,
}

#[pymethods]
impl PyFundingParams {
    /// The five-asset benchmark at `J = steps` and correlation `rho`.
    #[staticmethod]
    #[pyo3(signature = (steps=20, rho=0.3))]
    fn benchmark(steps: usize, rho: f64) -> Self {
        Self {
            inner: FundingParams::benchmark().with_grid(steps, rho),
        }
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Self { inner: from_json(s)? })
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.inner)
    }

    #[getter]
    fn truncation(&self) -> f64 {
        self.inner.truncation
    }

    #[setter]
    fn set_truncation(&mut self, c: f64) {
        self.inner.truncation = c;
    }

    #[getter]
    fn dt(&self) -> f64 {
        self.inner.dt()
    }

    /// `(holds, lhs, slack)` of the sufficient truncation condition.
    fn check_truncation(&self) -> PyResult<(bool, f64, f64)> {
        let c = models::check_truncation(&self.inner).map_err(to_py)?;
        Ok((c.holds, c.lhs, c.slack))
    }
}

#[pyclass(name = "StoppingParams", module = "bsde_bounds", skip_from_py_object)]
#[derive(Clone)]
struct PyStoppingParams {
    inner: StoppingParams,
}

#[pymethods]
impl PyStoppingParams {
    /// Price doubles or halves with equal probability over two steps.
    #[staticmethod]
    fn binomial() -> Self {
        Self {
            inner: StoppingParams::binomial(),
        }
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Self { inner: from_json(s)? })
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.inner)
    }

    /// Exact `Y_0` by backward induction over the full tree.
    fn solve_exact(&self) -> PyResult<f64> {
        let (dp, model) = models::stopping_model(&self.inner).map_err(to_py)?;
        solve_exact(&dp, &model).map(|t| t.root_value()).map_err(to_py)
    }
}

/// Fits and evaluates every grid cell.
#[pyfunction]
fn run(py: Python<'_>, config: &PyExperimentConfig) -> PyResult<PyExperimentResult> {
    let cfg = config.inner.clone();
    let inner = py.detach(|| experiment::run(&cfg)).map_err(to_py)?;
    Ok(PyExperimentResult { inner })
}

/// Fits the input approximations; returns them as JSON.
#[pyfunction]
fn fit(py: Python<'_>, config: &PyExperimentConfig) -> PyResult<String> {
    let cfg = config.inner.clone();
    let fits = py.detach(|| experiment::fit(&cfg)).map_err(to_py)?;
    json(&fits)
}

/// Evaluates the bounds for fits produced by [`fit`].
#[pyfunction]
fn bound(py: Python<'_>, config: &PyExperimentConfig, fits: &str) -> PyResult<PyExperimentResult> {
    let cfg = config.inner.clone();
    let fits: Vec<FittedCell> = from_json(fits)?;
    let inner = py.detach(|| experiment::bound(&cfg, &fits)).map_err(to_py)?;
    Ok(PyExperimentResult { inner })
}

#[pyfunction]
fn verify(py: Python<'_>, config: &PyExperimentConfig) -> PyResult<PyVerifyReport> {
    let cfg = config.inner.clone();
    let inner = py.detach(|| experiment::verify(&cfg)).map_err(to_py)?;
    Ok(PyVerifyReport { inner })
}

/// Mean, sample standard deviation and normal half-width at level `alpha`.
#[pyfunction]
#[pyo3(signature = (samples, alpha=0.05))]
fn summarize(samples: Vec<f64>, alpha: f64) -> PyResult<PyBoundEstimate> {
    stats::summarize(&samples, alpha)
        .map(|inner| PyBoundEstimate { inner })
        .map_err(to_py)
}

#[pymodule]
fn bsde_bounds(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("TruncationError", m.py().get_type::<TruncationError>())?;
    m.add("DEFAULT_SEED", experiment::DEFAULT_SEED)?;
    m.add("FUNDING_PRESET", models::FUNDING_PRESET)?;
    m.add("STOPPING_PRESET", models::STOPPING_PRESET)?;
    m.add_class::<PyExperimentConfig>()?;
    m.add_class::<PyExperimentResult>()?;
    m.add_class::<PyResultRow>()?;
    m.add_class::<PyVerifyReport>()?;
    m.add_class::<PyBoundEstimate>()?;
    m.add_class::<PyFundingParams>()?;
    m.add_class::<PyStoppingParams>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(bound, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    Ok(())
}

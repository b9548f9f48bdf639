//! Python bindings for the `cauchy_gof` crate.
//!
//! Samples are passed as sequences of floats. Monte Carlo routines release
//! the GIL while they run.

use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use cauchy_gof::cli::{self, OutputFormat, TestRequest};
use cauchy_gof::distributions::{self as dist, AlternativeSpec};
use cauchy_gof::estimation::{self, FitMode, ScalingExponent};
use cauchy_gof::montecarlo::{self, CalibrationSpec, PowerStudySpec};
use cauchy_gof::statistic::{self, Method};
use cauchy_gof::{baselines, ecf, Error, Sample};

create_exception!(cauchy_gof, DegenerateSampleError, PyValueError, "Sample too small or degenerate for a Cauchy fit.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::SampleTooSmall { .. } | Error::DegenerateSample(_) => DegenerateSampleError::new_err(e.to_string()),
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn sample_from(x: Vec<f64>) -> PyResult<Sample> {
    Sample::new(x).map_err(to_py)
}

fn format_from(s: &str) -> PyResult<OutputFormat> {
    s.parse().map_err(to_py)
}

/// Statistic parameters.
#[pyclass(name = "TestConfig", module = "cauchy_gof", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyTestConfig {
    inner: statistic::TestConfig,
}

#[pymethods]
impl PyTestConfig {
    #[new]
    #[pyo3(signature = (a = 6.0, gamma = 2.5, exponent = 1.0, fit_mode = "joint", method = "auto", quad_nodes = 64))]
    fn new(a: f64, gamma: f64, exponent: f64, fit_mode: &str, method: &str, quad_nodes: usize) -> PyResult<Self> {
        let inner = statistic::TestConfig {
            a,
            gamma,
            exponent: ScalingExponent::new(exponent).map_err(to_py)?,
            fit_mode: fit_mode.parse().map_err(to_py)?,
            method: method.parse().map_err(to_py)?,
            quad_nodes,
        };
        inner.validate().map_err(to_py)?;
        Ok(PyTestConfig { inner })
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }
    #[getter]
    fn exponent(&self) -> f64 {
        self.inner.exponent.value()
    }
    #[getter]
    fn fit_mode(&self) -> String {
        self.inner.fit_mode.to_string()
    }
    #[getter]
    fn method(&self) -> String {
        self.inner.method.to_string()
    }
    #[getter]
    fn quad_nodes(&self) -> usize {
        self.inner.quad_nodes
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "TestConfig(a={}, gamma={}, exponent={}, fit_mode='{}', method='{}', quad_nodes={})",
            c.a,
            c.gamma,
            c.exponent.value(),
            c.fit_mode,
            c.method,
            c.quad_nodes
        )
    }
}

fn config_or_default(c: Option<PyTestConfig>) -> statistic::TestConfig {
    c.map(|c| c.inner).unwrap_or_default()
}

/// Maximum-likelihood Cauchy fit.
#[pyclass(name = "CauchyFit", module = "cauchy_gof", frozen, get_all, from_py_object)]
#[derive(Clone)]
struct PyCauchyFit {
    theta_hat: f64,
    lambda_hat: f64,
    log_likelihood: f64,
    iterations: usize,
    converged: bool,
    mode: String,
}

impl PyCauchyFit {
    fn to_core(&self) -> PyResult<estimation::CauchyFit> {
        Ok(estimation::CauchyFit {
            theta_hat: self.theta_hat,
            lambda_hat: self.lambda_hat,
            log_likelihood: self.log_likelihood,
            iterations: self.iterations,
            converged: self.converged,
            mode: self.mode.parse().map_err(to_py)?,
            start: estimation::StartPoint::MedianIqr,
        })
    }
}

impl From<estimation::CauchyFit> for PyCauchyFit {
    fn from(f: estimation::CauchyFit) -> Self {
        PyCauchyFit {
            theta_hat: f.theta_hat,
            lambda_hat: f.lambda_hat,
            log_likelihood: f.log_likelihood,
            iterations: f.iterations,
            converged: f.converged,
            mode: f.mode.to_string(),
        }
    }
}

#[pymethods]
impl PyCauchyFit {
    fn __repr__(&self) -> String {
        format!(
            "CauchyFit(theta_hat={}, lambda_hat={}, converged={}, mode='{}')",
            self.theta_hat, self.lambda_hat, self.converged, self.mode
        )
    }
}

/// Value of the test statistic with computation diagnostics.
#[pyclass(name = "StatisticValue", module = "cauchy_gof", frozen, get_all)]
struct PyStatisticValue {
    delta: f64,
    method_used: String,
    n: usize,
    quad_nodes_used: Option<usize>,
    quad_capped: bool,
    fit: Option<PyCauchyFit>,
}

impl From<statistic::StatisticValue> for PyStatisticValue {
    fn from(v: statistic::StatisticValue) -> Self {
        PyStatisticValue {
            delta: v.delta,
            method_used: v.method_used.to_string(),
            n: v.n,
            quad_nodes_used: v.quad_nodes_used,
            quad_capped: v.quad_capped,
            fit: v.fit.map(Into::into),
        }
    }
}

#[pymethods]
impl PyStatisticValue {
    fn __float__(&self) -> f64 {
        self.delta
    }

    fn __repr__(&self) -> String {
        format!("StatisticValue(delta={}, method_used='{}', n={})", self.delta, self.method_used, self.n)
    }
}

/// KS, Cramer-von Mises, Anderson-Darling and Watson statistics.
#[pyclass(name = "EdfStatistics", module = "cauchy_gof", frozen, get_all)]
struct PyEdfStatistics {
    ks: f64,
    cvm: f64,
    ad: f64,
    watson: f64,
}

#[pymethods]
impl PyEdfStatistics {
    fn __repr__(&self) -> String {
        format!("EdfStatistics(ks={}, cvm={}, ad={}, watson={})", self.ks, self.cvm, self.ad, self.watson)
    }
}

/// Outcome of a goodness-of-fit test on one sample.
#[pyclass(name = "TestReport", module = "cauchy_gof", frozen)]
struct PyTestReport {
    inner: cli::TestReport,
}

#[pymethods]
impl PyTestReport {
    #[getter]
    fn statistic(&self) -> f64 {
        self.inner.statistic
    }
    #[getter]
    fn critical_value(&self) -> f64 {
        self.inner.critical_value
    }
    #[getter]
    fn p_value(&self) -> Option<f64> {
        self.inner.p_value
    }
    #[getter]
    fn reject(&self) -> bool {
        self.inner.reject
    }
    #[getter]
    fn level(&self) -> f64 {
        self.inner.level
    }
    #[getter]
    fn fit(&self) -> PyCauchyFit {
        let f = &self.inner.fit;
        PyCauchyFit {
            theta_hat: f.theta_hat,
            lambda_hat: f.lambda_hat,
            log_likelihood: f.log_likelihood,
            iterations: f.iterations,
            converged: f.converged,
            mode: self.inner.config.fit_mode.to_string(),
        }
    }

    #[pyo3(signature = (format = "json"))]
    fn render(&self, format: &str) -> PyResult<String> {
        cli::render_test_report(&self.inner, format_from(format)?).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "TestReport(statistic={}, critical_value={}, p_value={:?}, reject={})",
            self.inner.statistic, self.inner.critical_value, self.inner.p_value, self.inner.reject
        )
    }
}

/// Simulated critical values for one sample size.
#[pyclass(name = "CriticalValueTable", module = "cauchy_gof", frozen)]
struct PyCriticalValueTable {
    inner: montecarlo::CriticalValueTable,
}

#[pymethods]
impl PyCriticalValueTable {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }
    #[getter]
    fn reps(&self) -> usize {
        self.inner.reps
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }
    /// `[(level, critical_value), ...]`
    #[getter]
    fn rows(&self) -> Vec<(f64, f64)> {
        self.inner.rows.iter().map(|r| (r.level, r.critical_value)).collect()
    }

    fn critical_value(&self, level: f64) -> Option<f64> {
        self.inner.critical_value(level)
    }

    #[pyo3(signature = (format = "markdown"))]
    fn render(&self, format: &str) -> PyResult<String> {
        cli::render_critical_values(std::slice::from_ref(&self.inner), format_from(format)?).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("CriticalValueTable(n={}, reps={}, rows={:?})", self.inner.n, self.inner.reps, self.rows())
    }
}

/// Rejection rates against a list of alternatives.
#[pyclass(name = "PowerTable", module = "cauchy_gof", frozen)]
struct PyPowerTable {
    inner: montecarlo::PowerTable,
}

#[pymethods]
impl PyPowerTable {
    #[getter]
    fn critical_value(&self) -> f64 {
        self.inner.critical_value
    }
    /// `[(label, rejection_rate)]` for the characteristic-function test.
    #[getter]
    fn rates(&self) -> Vec<(String, f64)> {
        self.inner.rows.iter().map(|r| (r.label.clone(), r.rejection_rate)).collect()
    }
    /// `[(label, ks, cvm, ad, watson)]` when the baselines were run.
    #[getter]
    fn baseline_rates(&self) -> Option<Vec<(String, f64, f64, f64, f64)>> {
        self.inner
            .rows
            .iter()
            .map(|r| r.baselines.map(|b| (r.label.clone(), b.ks, b.cvm, b.ad, b.watson)))
            .collect()
    }

    #[pyo3(signature = (format = "markdown"))]
    fn render(&self, format: &str) -> PyResult<String> {
        cli::render_power(std::slice::from_ref(&self.inner), format_from(format)?).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("PowerTable(n={}, rates={:?})", self.inner.n, self.rates())
    }
}

/// Fits location and scale (`mode="joint"`) or scale only (`"scale_only"`).
#[pyfunction]
#[pyo3(signature = (x, mode = "joint"))]
fn fit(x: Vec<f64>, mode: &str) -> PyResult<PyCauchyFit> {
    let mode: FitMode = mode.parse().map_err(to_py)?;
    estimation::fit_cauchy_ml(&sample_from(x)?, mode).map(Into::into).map_err(to_py)
}

/// Divides the data by `lambda_hat ** exponent`.
#[pyfunction]
#[pyo3(signature = (x, fit, exponent = 1.0))]
fn standardize(x: Vec<f64>, fit: PyCauchyFit, exponent: f64) -> PyResult<Vec<f64>> {
    let e = ScalingExponent::new(exponent).map_err(to_py)?;
    estimation::standardize(&sample_from(x)?, &fit.to_core()?, e).map(Sample::into_values).map_err(to_py)
}

/// Fits, scales and evaluates the statistic on raw data.
#[pyfunction]
#[pyo3(signature = (x, config = None))]
fn compute_statistic(x: Vec<f64>, config: Option<PyTestConfig>) -> PyResult<PyStatisticValue> {
    statistic::compute_statistic(&sample_from(x)?, &config_or_default(config)).map(Into::into).map_err(to_py)
}

/// Exact V-statistic on already scaled data (integer `a`).
#[pyfunction]
fn delta_vstat(y: Vec<f64>, a: u32, gamma: f64) -> PyResult<f64> {
    statistic::delta_vstat(&y, a, gamma).map(|v| v.delta).map_err(to_py)
}

/// Quadrature evaluation on already scaled data.
#[pyfunction]
#[pyo3(signature = (y, config = None))]
fn delta_quadrature(y: Vec<f64>, config: Option<PyTestConfig>) -> PyResult<f64> {
    let cfg = statistic::TestConfig { method: Method::Quadrature, ..config_or_default(config) };
    statistic::delta_quadrature(&y, &cfg).map(|v| v.delta).map_err(to_py)
}

/// Empirical characteristic function at `t`.
#[pyfunction]
fn ecf_eval(x: Vec<f64>, t: f64) -> cauchy_gof::ComplexValue {
    ecf::ecf_eval(&x, t)
}

/// `phi_n(t)^a - phi_n(a t)`.
#[pyfunction]
fn d_n(x: Vec<f64>, a: f64, t: f64) -> cauchy_gof::ComplexValue {
    ecf::d_n(&x, a, t)
}

/// Seeded draws, e.g. `sample("t:4", 50, seed=1)`.
#[pyfunction]
#[pyo3(signature = (dist, n, seed = 1))]
fn sample(dist: &str, n: usize, seed: u64) -> PyResult<Vec<f64>> {
    let spec: AlternativeSpec = dist.parse().map_err(to_py)?;
    dist::sample(&spec, n, seed).map(Sample::into_values).map_err(to_py)
}

/// Sorted probability-integral transform under a joint fit.
#[pyfunction]
fn pit(x: Vec<f64>, fit: PyCauchyFit) -> PyResult<Vec<f64>> {
    baselines::pit_transform(&sample_from(x)?, &fit.to_core()?).map(|p| p.values().to_vec()).map_err(to_py)
}

/// EDF statistics of the PIT; the sample is fitted when no fit is given.
#[pyfunction]
#[pyo3(signature = (x, fit = None))]
fn edf_statistics(x: Vec<f64>, fit: Option<PyCauchyFit>) -> PyResult<PyEdfStatistics> {
    let s = sample_from(x)?;
    let f = match fit {
        Some(f) => f.to_core()?,
        None => estimation::fit_cauchy_ml(&s, FitMode::Joint).map_err(to_py)?,
    };
    let e = baselines::edf_statistics(&baselines::pit_transform(&s, &f).map_err(to_py)?);
    Ok(PyEdfStatistics { ks: e.ks, cvm: e.cvm, ad: e.ad, watson: e.watson })
}

/// Critical values under `C(0, 1)`.
#[pyfunction]
#[pyo3(signature = (n, config = None, reps = 10_000, levels = vec![0.05, 0.10], seed = 1, threads = None))]
fn calibrate(
    py: Python<'_>,
    n: usize,
    config: Option<PyTestConfig>,
    reps: usize,
    levels: Vec<f64>,
    seed: u64,
    threads: Option<usize>,
) -> PyResult<PyCriticalValueTable> {
    let spec = CalibrationSpec { n, cfg: config_or_default(config), reps, levels, seed, threads };
    py.detach(|| montecarlo::calibrate(&spec)).map(|inner| PyCriticalValueTable { inner }).map_err(to_py)
}

/// Parametric-bootstrap p-value of the statistic for `x`.
#[pyfunction]
#[pyo3(signature = (x, config = None, reps = 999, seed = 1))]
fn mc_pvalue(py: Python<'_>, x: Vec<f64>, config: Option<PyTestConfig>, reps: usize, seed: u64) -> PyResult<f64> {
    let s = sample_from(x)?;
    let cfg = config_or_default(config);
    py.detach(|| montecarlo::mc_pvalue(&s, &cfg, reps, seed)).map_err(to_py)
}

/// Rejection rates against alternatives given as a comma-separated string
/// or a list of strings.
#[pyfunction]
#[pyo3(signature = (
    n, alternatives, config = None, reps = 3000, level = 0.10, seed = 1,
    baselines = false, calibration_reps = 10_000, threads = None
))]
#[allow(clippy::too_many_arguments)]
fn power_study(
    py: Python<'_>,
    n: usize,
    alternatives: Bound<'_, PyAny>,
    config: Option<PyTestConfig>,
    reps: usize,
    level: f64,
    seed: u64,
    baselines: bool,
    calibration_reps: usize,
    threads: Option<usize>,
) -> PyResult<PyPowerTable> {
    let alts = match alternatives.extract::<String>() {
        Ok(s) => AlternativeSpec::parse_list(&s).map_err(to_py)?,
        Err(_) => alternatives
            .extract::<Vec<String>>()?
            .iter()
            .map(|s| s.parse().map_err(to_py))
            .collect::<PyResult<_>>()?,
    };
    let spec = PowerStudySpec {
        n,
        alternatives: alts,
        cfg: config_or_default(config),
        reps,
        level,
        seed,
        baseline_tests: baselines,
        calibration_reps,
        threads,
    };
    py.detach(|| montecarlo::power_study(&spec)).map(|inner| PyPowerTable { inner }).map_err(to_py)
}

/// Full test: statistic, simulated critical value, optional p-value and
/// optional EDF baselines.
#[pyfunction]
#[pyo3(signature = (
    x, config = None, level = 0.05, pvalue_reps = None, calibration_reps = 10_000,
    seed = 1, baselines = false, threads = None
))]
#[allow(clippy::too_many_arguments)]
fn test(
    py: Python<'_>,
    x: Vec<f64>,
    config: Option<PyTestConfig>,
    level: f64,
    pvalue_reps: Option<usize>,
    calibration_reps: usize,
    seed: u64,
    baselines: bool,
    threads: Option<usize>,
) -> PyResult<PyTestReport> {
    let s = sample_from(x)?;
    let req = TestRequest {
        cfg: config_or_default(config),
        level,
        pvalue_reps,
        calibration_reps,
        seed,
        baselines,
        threads,
    };
    py.detach(|| cli::run_test(&s, &req)).map(|inner| PyTestReport { inner }).map_err(to_py)
}

/// Parses one number per line (or a CSV column) from text.
#[pyfunction]
#[pyo3(signature = (text, column = None))]
fn parse_values(text: &str, column: Option<&str>) -> PyResult<Vec<f64>> {
    cli::parse_values(text, column).map(Sample::into_values).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "cauchy_gof")]
fn cauchy_gof_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", cauchy_gof::ENGINE_VERSION)?;
    m.add("DegenerateSampleError", m.py().get_type::<DegenerateSampleError>())?;
    m.add_class::<PyTestConfig>()?;
    m.add_class::<PyCauchyFit>()?;
    m.add_class::<PyStatisticValue>()?;
    m.add_class::<PyEdfStatistics>()?;
    m.add_class::<PyTestReport>()?;
    m.add_class::<PyCriticalValueTable>()?;
    m.add_class::<PyPowerTable>()?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(standardize, m)?)?;
    m.add_function(wrap_pyfunction!(compute_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(delta_vstat, m)?)?;
    m.add_function(wrap_pyfunction!(delta_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(ecf_eval, m)?)?;
    m.add_function(wrap_pyfunction!(d_n, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(pit, m)?)?;
    m.add_function(wrap_pyfunction!(edf_statistics, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(mc_pvalue, m)?)?;
    m.add_function(wrap_pyfunction!(power_study, m)?)?;
    m.add_function(wrap_pyfunction!(test, m)?)?;
    m.add_function(wrap_pyfunction!(parse_values, m)?)?;
    Ok(())
}

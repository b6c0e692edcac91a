//! Python bindings. Reports cross the boundary as JSON and are decoded
//! into plain dicts and lists on the Python side.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;

use ::selfsim::dimension::{self, BowenSampling, Subset};
use ::selfsim::dynamics::{self as dynamics_mod, MetricSystem};
use ::selfsim::experiment;
use ::selfsim::measure;
use ::selfsim::symbolic::{self as symbolic_mod, TransitionMatrix};
use ::selfsim::torus::{self as torus_mod, TorusPoint};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A subshift of finite type with the metric `λ^(−T)`.
#[pyclass(name = "SymbolicSystem", module = "selfsim", frozen)]
struct SymbolicSystem {
    inner: symbolic_mod::SymbolicSystem,
}

#[pymethods]
impl SymbolicSystem {
    #[new]
    #[pyo3(signature = (matrix, lam = 2.0))]
    fn new(matrix: Vec<Vec<u8>>, lam: f64) -> PyResult<Self> {
        let m = TransitionMatrix::new(matrix).map_err(err)?;
        Ok(Self { inner: symbolic_mod::SymbolicSystem::new(m, lam).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (symbols = 2, lam = 2.0))]
    fn full_shift(symbols: usize, lam: f64) -> PyResult<Self> {
        Ok(Self { inner: symbolic_mod::SymbolicSystem::full_shift(symbols, lam).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (lam = 2.0))]
    fn golden_mean(lam: f64) -> PyResult<Self> {
        Ok(Self { inner: symbolic_mod::SymbolicSystem::golden_mean(lam).map_err(err)? })
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda()
    }

    #[getter]
    fn xi(&self) -> f64 {
        self.inner.xi()
    }

    fn spectral_radius(&self) -> PyResult<f64> {
        self.inner.spectral_radius().map_err(err)
    }

    fn is_primitive(&self) -> bool {
        self.inner.matrix().is_primitive()
    }

    /// Number of admissible words of length `n`, as a decimal string.
    fn count_words(&self, n: usize) -> String {
        self.inner.count_words(n).to_string()
    }

    fn exact_cov(&self, eps: f64) -> PyResult<String> {
        Ok(self.inner.exact_cov(eps).map_err(err)?.to_string())
    }

    #[pyo3(signature = (pairs = 10_000, max_level = 12, seed = 0))]
    fn verify<'py>(&self, py: Python<'py>, pairs: usize, max_level: u32, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let sample = self.inner.sample_pairs(pairs, max_level, seed);
        let r = py.detach(|| dynamics_mod::verify_self_similar(&self.inner, &sample, 0.0));
        to_py(py, &r)
    }

    fn capacity<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let (_, fit) = dimension::capacity_symbolic(&self.inner, &Subset::Whole, &dimension::symbolic_scales(self.inner.lambda()))
            .map_err(err)?;
        to_py(py, &fit)
    }

    #[pyo3(signature = (n_max = 12))]
    fn entropy<'py>(&self, py: Python<'py>, n_max: u32) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &dimension::entropy_symbolic(&self.inner, &Subset::Whole, n_max).map_err(err)?)
    }

    #[pyo3(signature = (n_max = 12))]
    fn fundamental<'py>(&self, py: Python<'py>, n_max: u32) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &dimension::check_fundamental_symbolic(&self.inner, &Subset::Whole, n_max).map_err(err)?)
    }

    fn intrinsic_exponent(&self) -> PyResult<f64> {
        measure::symbolic_intrinsic_exponent(&self.inner).map_err(err)
    }

    /// Normalised depth-`k` box masses next to the Parry masses.
    #[pyo3(signature = (k = 8, depth = 12))]
    fn parry_compare<'py>(&self, py: Python<'py>, k: usize, depth: u32) -> PyResult<Bound<'py, PyAny>> {
        let d = measure::symbolic_intrinsic_exponent(&self.inner).map_err(err)?;
        to_py(py, &measure::parry_compare(&self.inner, k, d, depth).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("SymbolicSystem(symbols={}, lam={})", self.inner.matrix().size(), self.inner.lambda())
    }
}

/// A hyperbolic automorphism of the 2-torus with its self-similar metric.
#[pyclass(name = "ToralSystem", module = "selfsim", frozen)]
struct ToralSystem {
    inner: torus_mod::ToralSystem,
}

#[pymethods]
impl ToralSystem {
    #[new]
    #[pyo3(signature = (matrix, lam = None, xi = torus_mod::DEFAULT_XI))]
    fn new(matrix: [[i64; 2]; 2], lam: Option<f64>, xi: f64) -> PyResult<Self> {
        Ok(Self { inner: torus_mod::ToralSystem::with_xi(matrix, lam, xi).map_err(err)? })
    }

    #[staticmethod]
    fn cat_map() -> Self {
        Self { inner: torus_mod::ToralSystem::cat_map() }
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda()
    }

    #[getter]
    fn xi(&self) -> f64 {
        self.inner.xi()
    }

    fn distance(&self, p: (f64, f64), q: (f64, f64)) -> f64 {
        self.inner.distance(&TorusPoint::new(p.0, p.1), &TorusPoint::new(q.0, q.1))
    }

    fn apply(&self, p: (f64, f64)) -> (f64, f64) {
        let [x, y] = self.inner.apply(&TorusPoint::new(p.0, p.1)).coords();
        (x, y)
    }

    fn bracket(&self, p: (f64, f64), q: (f64, f64)) -> PyResult<(f64, f64)> {
        use dynamics_mod::ProductStructure;
        let z = self.inner.bracket(&TorusPoint::new(p.0, p.1), &TorusPoint::new(q.0, q.1)).map_err(err)?;
        let [x, y] = z.coords();
        Ok((x, y))
    }

    #[pyo3(signature = (scale = 0.01, pairs = 10_000, seed = 0))]
    fn verify<'py>(&self, py: Python<'py>, scale: f64, pairs: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let sample = self.inner.sample_pairs(scale, pairs, seed).map_err(err)?;
        let tol = self.inner.tolerance();
        let r = py.detach(|| dynamics_mod::verify_self_similar(&self.inner, &sample, tol));
        to_py(py, &r)
    }

    fn capacity<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let c = py.detach(|| dimension::capacity_toral(&self.inner, &dimension::default_toral_scales())).map_err(err)?;
        to_py(py, &c.combined)
    }

    #[pyo3(signature = (n_max = 8, seed = 0))]
    fn entropy<'py>(&self, py: Python<'py>, n_max: u32, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let sampling = BowenSampling { seed, ..BowenSampling::default() };
        let r = py.detach(|| dimension::entropy_toral(&self.inner, n_max, &sampling)).map_err(err)?;
        to_py(py, &r)
    }

    fn __repr__(&self) -> String {
        format!("ToralSystem(matrix={:?}, lam={})", self.inner.matrix(), self.inner.lambda())
    }
}

/// Validates a JSON configuration and returns it with defaults filled in.
#[pyfunction]
fn parse_config<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    let c = experiment::parse_config(text).map_err(err)?;
    to_py(py, &c)
}

/// Runs a configured experiment and returns the report.
#[pyfunction]
fn run_experiment<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    let c = experiment::parse_config(text).map_err(err)?;
    let r = py.detach(|| experiment::run(&c)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn ideal_factor(ent: f64, dim: u32) -> PyResult<f64> {
    dimension::ideal_factor(ent, dim).map_err(err)
}

#[pymodule]
#[pyo3(name = "selfsim")]
fn selfsim_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SymbolicSystem>()?;
    m.add_class::<ToralSystem>()?;
    m.add_function(wrap_pyfunction!(parse_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(ideal_factor, m)?)?;
    m.add("__version__", experiment::TOOL_VERSION)?;
    Ok(())
}

//! Python bindings. Exact rationals cross over as `fractions.Fraction`,
//! counts as Python integers and structured reports as dictionaries.

use num_bigint::BigUint;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pitree::homogeneity::homogeneity_report;
use pitree::measure::{self, lambda_report, DEFAULT_WINDOW};
use pitree::rational::ExactRational;
use pitree::sampler::{self, BitSource, DEFAULT_SEED};
use pitree::tree::{self, Limits};
use pitree::verify::{self, Suite};
use pitree::{ClassExpr, Error, Word};

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(_) | Error::Json(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn word(text: &str) -> PyResult<Word> {
    text.parse().map_err(err)
}

fn fraction<'py>(py: Python<'py>, r: &ExactRational) -> PyResult<Bound<'py, PyAny>> {
    let frac = py.import("fractions")?.getattr("Fraction")?;
    frac.call1((r.numer().clone(), r.denom().clone()))
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// A parsed class expression.
#[pyclass(name = "Expr", module = "pitree_py", frozen)]
struct PyExpr {
    inner: ClassExpr,
}

#[pymethods]
impl PyExpr {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyExpr {
            inner: pitree::parse(text).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Expr({:?})", self.inner.to_dsl())
    }

    fn __str__(&self) -> String {
        self.inner.to_dsl()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn to_dsl(&self) -> String {
        self.inner.to_dsl()
    }

    fn extendible(&self, sigma: &str) -> PyResult<bool> {
        Ok(self.inner.extendible(&word(sigma)?))
    }

    fn count(&self, n: u64) -> PyResult<BigUint> {
        tree::count(&self.inner, n, &Limits::default()).map_err(err)
    }

    fn levels(&self, n: usize) -> PyResult<Vec<String>> {
        let level = tree::levels(&self.inner, n, &Limits::default()).map_err(err)?;
        Ok(level.words().map(|w| w.to_dsl()).collect())
    }

    fn theta(&self, sigma: &str) -> PyResult<usize> {
        measure::theta(&self.inner, &word(sigma)?).map_err(err)
    }

    fn mu<'py>(&self, py: Python<'py>, sigma: &str) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &measure::mu(&self.inner, &word(sigma)?))
    }

    fn ratio<'py>(&self, py: Python<'py>, sigma: &str, n: usize) -> PyResult<Bound<'py, PyAny>> {
        let r = measure::ratio(&self.inner, &word(sigma)?, n).map_err(err)?;
        fraction(py, &r)
    }

    fn phi_map(&self, sigma: &str) -> PyResult<String> {
        Ok(measure::phi_map(&self.inner, &word(sigma)?).to_dsl())
    }

    #[pyo3(signature = (sigma, depth, window = DEFAULT_WINDOW))]
    fn lambda_report<'py>(
        &self,
        py: Python<'py>,
        sigma: &str,
        depth: usize,
        window: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let r = lambda_report(&self.inner, &word(sigma)?, depth, window).map_err(err)?;
        json_to_py(py, &r.to_json())
    }

    #[pyo3(signature = (depth, n = 2))]
    fn homog<'py>(&self, py: Python<'py>, depth: usize, n: usize) -> PyResult<Bound<'py, PyAny>> {
        let r = homogeneity_report(&self.inner, n, depth).map_err(err)?;
        json_to_py(py, &r.to_json())
    }

    /// Produces a path of length `n` from a fixed string of bits.
    fn produce_path<'py>(&self, py: Python<'py>, bits: &str, n: usize) -> PyResult<Bound<'py, PyAny>> {
        let mut src = BitSource::from_text(bits).map_err(err)?;
        let p = sampler::produce_path(&self.inner, &mut src, n).map_err(err)?;
        json_to_py(py, &p.to_json())
    }

    #[pyo3(signature = (depth, samples, seed = DEFAULT_SEED))]
    fn empirical_measure<'py>(
        &self,
        py: Python<'py>,
        depth: usize,
        samples: u64,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let r = py
            .detach(|| sampler::empirical_measure(&self.inner, depth, samples, seed, &Limits::default()))
            .map_err(err)?;
        json_to_py(py, &r.to_json())
    }
}

/// Runs one verification suite, or all of them, and returns
/// `{"ok": bool, "suites": [...]}`.
#[pyfunction]
#[pyo3(signature = (depth, suite = "all"))]
fn run_verify<'py>(py: Python<'py>, depth: usize, suite: &str) -> PyResult<Bound<'py, PyAny>> {
    let results = if suite == "all" {
        py.detach(|| verify::run_all(depth))
    } else {
        let s: Suite = suite.parse().map_err(err)?;
        vec![py.detach(|| verify::run(s, depth))]
    };
    let out = PyDict::new(py);
    out.set_item("ok", results.iter().all(|r| r.ok()))?;
    let suites = results
        .iter()
        .map(|r| json_to_py(py, &r.to_json()))
        .collect::<PyResult<Vec<_>>>()?;
    out.set_item("suites", suites)?;
    Ok(out.into_any())
}

#[pymodule]
pub fn pitree_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyExpr>()?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("BUILTINS", pitree::catalog::BUILTINS.to_vec())?;
    Ok(())
}

//! Python bindings for `zerovar`.
//!
//! Reports come back as plain dicts with the same field names as the JSON
//! the command-line tool prints.

use pyo3::exceptions::{PyArithmeticError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use zerovar::ensemble::{eval_basis, jacobi_recurrence, load_recurrence, RecurrenceTable};
use zerovar::montecarlo::{GridConfig, ResourceCap};
use zerovar::{Error, kacrice, montecarlo, universal};

fn to_py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Io(_) => PyOSError::new_err(msg),
        Error::Degenerate { .. } | Error::Consistency(_) => PyArithmeticError::new_err(msg),
        Error::Budget(_) => PyRuntimeError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_u64() {
            Some(u) => u.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn report<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

/// Three-term recurrence table of an orthonormal polynomial family.
#[pyclass(name = "Ensemble", module = "zerovar_py", frozen)]
struct PyEnsemble {
    table: RecurrenceTable,
}

#[pymethods]
impl PyEnsemble {
    /// Jacobi weight (1 - x)^alpha (1 + x)^beta, degrees up to `capacity`.
    #[staticmethod]
    fn jacobi(alpha: f64, beta: f64, capacity: usize) -> PyResult<Self> {
        let table = jacobi_recurrence(alpha, beta, capacity).map_err(to_py_err)?;
        Ok(PyEnsemble { table })
    }

    #[staticmethod]
    fn legendre(capacity: usize) -> PyResult<Self> {
        Self::jacobi(0.0, 0.0, capacity)
    }

    #[staticmethod]
    fn chebyshev(capacity: usize) -> PyResult<Self> {
        Self::jacobi(-0.5, -0.5, capacity)
    }

    /// Custom recurrence file (`p0 <value>` then `<k> <a_k> <b_{k+1}>` rows).
    #[staticmethod]
    fn from_file(path: std::path::PathBuf) -> PyResult<Self> {
        let table = load_recurrence(path).map_err(to_py_err)?;
        Ok(PyEnsemble { table })
    }

    #[getter]
    fn label(&self) -> String {
        self.table.label()
    }

    #[getter]
    fn capacity(&self) -> usize {
        self.table.capacity()
    }

    #[getter]
    fn p0(&self) -> f64 {
        self.table.p0()
    }

    #[getter]
    fn mass(&self) -> Option<f64> {
        self.table.mass()
    }

    fn a(&self, k: usize) -> PyResult<f64> {
        if k >= self.table.capacity() {
            return Err(PyValueError::new_err(format!("a_{k} is outside the table")));
        }
        Ok(self.table.a(k))
    }

    fn b(&self, k: usize) -> PyResult<f64> {
        if k == 0 || k > self.table.capacity() {
            return Err(PyValueError::new_err(format!("b_{k} is outside the table")));
        }
        Ok(self.table.b(k))
    }

    /// [p_0(x), ..., p_n(x)].
    fn basis(&self, n: usize, x: f64) -> PyResult<Vec<f64>> {
        let b = eval_basis(&self.table, n, x, 0).map_err(to_py_err)?;
        Ok((0..=n).map(|j| b.get(j, 0)).collect())
    }

    fn __repr__(&self) -> String {
        format!("Ensemble('{}', capacity={})", self.table.label(), self.table.capacity())
    }
}

/// One-point zero intensity of the degree-n ensemble at x.
#[pyfunction]
fn rho1(ensemble: &PyEnsemble, n: usize, x: f64) -> PyResult<f64> {
    zerovar::intensity::rho1(&ensemble.table, n, x).map_err(to_py_err)
}

/// Pair-correlation defect at y = x + u / (n omega(x)), scaled by (n omega(x))^-2.
#[pyfunction]
fn scaled_defect(ensemble: &PyEnsemble, n: usize, x: f64, u: f64) -> PyResult<f64> {
    zerovar::intensity::scaled_defect(&ensemble.table, n, x, u).map_err(to_py_err)
}

#[pyfunction]
fn xi(u: f64) -> PyResult<f64> {
    universal::xi(u).map_err(to_py_err)
}

#[pyfunction]
fn omega_mass(a: f64, b: f64) -> PyResult<f64> {
    zerovar::equilibrium::omega_mass(a, b).map_err(to_py_err)
}

#[pyfunction]
#[pyo3(signature = (window = 1000.0, threshold = universal::SERIES_THRESHOLD, tol = 1e-4))]
fn universal_constant(py: Python<'_>, window: f64, threshold: f64, tol: f64) -> PyResult<Bound<'_, PyAny>> {
    let r = py
        .detach(|| universal::universal_constant(window, threshold, tol))
        .map_err(to_py_err)?;
    report(py, &r)
}

#[pyfunction]
#[pyo3(signature = (ensemble, n, a, b, tol = 1e-10))]
fn expected_zeros(ensemble: &PyEnsemble, n: usize, a: f64, b: f64, tol: f64) -> PyResult<f64> {
    kacrice::expected_zeros(&ensemble.table, n, a, b, tol).map_err(to_py_err)
}

/// Kac-Rice variance of the zero count in [a, b].
#[pyfunction]
#[pyo3(signature = (ensemble, n, a, b, *, lambda_ = 30.0, eta = 0.05, panel_target = 1e-3, max_evals = 200_000_000))]
#[allow(clippy::too_many_arguments)]
fn variance<'py>(
    py: Python<'py>,
    ensemble: &PyEnsemble,
    n: usize,
    a: f64,
    b: f64,
    lambda_: f64,
    eta: f64,
    panel_target: f64,
    max_evals: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = kacrice::VarianceQuadratureConfig {
        lambda: lambda_,
        eta,
        panel_target,
        max_evals,
    };
    let r = py
        .detach(|| kacrice::variance(&ensemble.table, n, a, b, &cfg))
        .map_err(to_py_err)?;
    report(py, &r)
}

/// Monte Carlo law of the zero count in [a, b].
#[pyfunction]
#[pyo3(signature = (ensemble, n, a, b, samples, *, seed = 0, grid_per_wavelength = 8, max_flops = 1e13))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    ensemble: &PyEnsemble,
    n: usize,
    a: f64,
    b: f64,
    samples: usize,
    seed: u64,
    grid_per_wavelength: usize,
    max_flops: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let r = py
        .detach(|| {
            montecarlo::simulate(
                &ensemble.table,
                n,
                a,
                b,
                samples,
                seed,
                GridConfig { grid_per_wavelength },
                ResourceCap { max_flops },
            )
        })
        .map_err(to_py_err)?;
    report(py, &r)
}

/// Coefficients of sample `index` for a given seed.
#[pyfunction]
fn sample_coefficients(seed: u64, index: u64, n: usize) -> Vec<f64> {
    montecarlo::sample_coefficients(seed, index, n)
}

/// Distinct zeros in [a, b] of sum_j coeffs[j] p_j, by the grid counter.
#[pyfunction]
#[pyo3(signature = (ensemble, coeffs, a, b, grid_per_wavelength = 8))]
fn count_zeros(ensemble: &PyEnsemble, coeffs: Vec<f64>, a: f64, b: f64, grid_per_wavelength: usize) -> PyResult<usize> {
    let n = coeffs
        .len()
        .checked_sub(1)
        .ok_or_else(|| PyValueError::new_err("no coefficients"))?;
    montecarlo::count_zeros_grid(&ensemble.table, n, &coeffs, a, b, GridConfig { grid_per_wavelength })
        .map_err(to_py_err)
}

/// Exact count of distinct zeros in (a, b] by Sturm sequences (Jacobi only).
#[pyfunction]
fn count_zeros_exact(ensemble: &PyEnsemble, coeffs: Vec<f64>, a: f64, b: f64) -> PyResult<usize> {
    use num_rational::BigRational;
    let rat = |v: f64| BigRational::from_float(v).ok_or_else(|| PyValueError::new_err("non-finite endpoint"));
    let mono = montecarlo::monomial_from_orthonormal(&ensemble.table, &coeffs).map_err(to_py_err)?;
    montecarlo::sturm_count(&mono, &rat(a)?, &rat(b)?).map_err(to_py_err)
}

#[pymodule]
pub fn zerovar_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEnsemble>()?;
    m.add_function(wrap_pyfunction!(rho1, m)?)?;
    m.add_function(wrap_pyfunction!(scaled_defect, m)?)?;
    m.add_function(wrap_pyfunction!(xi, m)?)?;
    m.add_function(wrap_pyfunction!(omega_mass, m)?)?;
    m.add_function(wrap_pyfunction!(universal_constant, m)?)?;
    m.add_function(wrap_pyfunction!(expected_zeros, m)?)?;
    m.add_function(wrap_pyfunction!(variance, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(sample_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(count_zeros, m)?)?;
    m.add_function(wrap_pyfunction!(count_zeros_exact, m)?)?;
    Ok(())
}

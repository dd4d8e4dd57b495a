//! Python module `ellpf`: nomes, theta functions, the twelve pfaffians, lattice
//! partition functions, eight-vertex chains and the verification suites.
//! Complex arguments and results are Python `complex`; labels are strings like "3h".

use std::str::FromStr;

use num_complex::Complex64 as C64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use ellpf_core::eightvertex as ev;
use ellpf_core::ellpf::{self as core_ellpf, SigmaLabel};
use ellpf_core::numkernel::{self, TruncationPolicy};
use ellpf_core::pfaffian::{self as core_pf, SkewMatrix};
use ellpf_core::soslattice as sos;
use ellpf_core::suites::{run_suite, Suite};

create_exception!(ellpf, EllpfError, PyException, "Numerical failure inside ellpf.");
create_exception!(ellpf, DegeneracyError, EllpfError, "Parameters sit on a zero or pole.");

fn py_err(e: ellpf_core::Error) -> PyErr {
    if e.is_degeneracy() {
        DegeneracyError::new_err(e.to_string())
    } else {
        EllpfError::new_err(e.to_string())
    }
}

fn label(sigma: &str) -> PyResult<SigmaLabel> {
    SigmaLabel::from_str(sigma).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Elliptic nome `p = e^{iπτ}` with `Im τ > 0`.
#[pyclass(name = "Nome", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyNome(numkernel::Nome);

#[pymethods]
impl PyNome {
    #[new]
    fn new(tau: C64) -> PyResult<Self> {
        numkernel::Nome::new(tau).map(PyNome).map_err(py_err)
    }

    /// Nome with `|p| = r` and `arg p = phi`.
    #[staticmethod]
    fn from_polar(r: f64, phi: f64) -> PyResult<Self> {
        numkernel::Nome::from_polar(r, phi).map(PyNome).map_err(py_err)
    }

    #[getter]
    fn p(&self) -> C64 {
        self.0.p()
    }

    #[getter]
    fn tau(&self) -> Option<C64> {
        self.0.tau()
    }

    #[getter]
    fn modulus(&self) -> f64 {
        self.0.modulus()
    }

    /// `p^λ = e^{iπτλ}`.
    fn p_pow(&self, lam: f64) -> C64 {
        self.0.p_pow(lam)
    }

    fn __repr__(&self) -> String {
        match self.0.tau() {
            Some(t) => format!("Nome(tau={}{:+}j)", t.re, t.im),
            None => "Nome(p=0)".to_string(),
        }
    }
}

/// Inhomogeneous eight-vertex chain at `η = π/3`.
#[pyclass(name = "EightVertexChain", frozen)]
struct PyChain(ev::EvParams);

#[pymethods]
impl PyChain {
    #[new]
    fn new(nome: PyNome, inhomogeneities: Vec<C64>) -> PyResult<Self> {
        ev::EvParams::new(nome.0, inhomogeneities).map(PyChain).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Transfer matrix `T(u)` as a list of rows.
    fn transfer_matrix(&self, u: C64) -> PyResult<Vec<Vec<C64>>> {
        let t = ev::transfer_matrix(u, &self.0).map_err(py_err)?;
        Ok(t.matrix.row_iter().map(|r| r.iter().copied().collect()).collect())
    }

    fn phi(&self, u: C64) -> PyResult<C64> {
        ev::phi(u, &self.0).map_err(py_err)
    }

    /// Pfaffian solution `Q^(σ)(u)` of the TQ equation.
    fn q(&self, sigma: &str, u: C64) -> PyResult<C64> {
        ev::q_sigma(label(sigma)?, u, &self.0).map_err(py_err)
    }

    /// Relative residual of the TQ equation for `Q^(σ)` at `u`.
    fn tq_residual(&self, sigma: &str, u: C64) -> PyResult<f64> {
        ev::tq_residual(label(sigma)?, u, &self.0).map_err(py_err)
    }
}

/// `θ(x; p) = (x; p)_∞ (p/x; p)_∞`.
#[pyfunction]
fn theta(x: C64, p: C64) -> PyResult<C64> {
    numkernel::theta(x, p, &TruncationPolicy::default()).map_err(py_err)
}

/// Jacobi theta function `θ_k(z | τ)`, `k ∈ {1, 2, 3, 4}`.
#[pyfunction]
fn theta_jacobi(k: u8, z: C64, nome: PyNome) -> PyResult<C64> {
    numkernel::theta_jacobi(k, z, &nome.0).map_err(py_err)
}

/// Pfaffian of a skew-symmetric matrix given as a list of rows.
#[pyfunction]
fn pfaffian(rows: Vec<Vec<C64>>) -> PyResult<C64> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    let a = SkewMatrix::new(n, rows.concat()).map_err(py_err)?;
    Ok(core_pf::pfaffian(&a))
}

/// `P_n^(σ)(z_1, …, z_2n)`.
#[pyfunction]
fn p_sigma(sigma: &str, z: Vec<C64>, nome: PyNome) -> PyResult<C64> {
    core_ellpf::p_sigma(label(sigma)?, &z, &nome.0).map_err(py_err)
}

/// Hankel determinant `H_n^(σ)` of the Lambert-series moments.
#[pyfunction]
fn hankel(sigma: &str, n: usize, nome: PyNome) -> PyResult<C64> {
    core_ellpf::hankel_h(label(sigma)?, n, &nome.0).map_err(py_err)
}

/// Glaisher number `T_j` as an exact integer.
#[pyfunction]
fn glaisher_t(py: Python<'_>, j: usize) -> PyResult<Py<PyAny>> {
    let t = core_ellpf::glaisher_t(j).map_err(py_err)?;
    Ok(t.into_pyobject(py)?.into_any().unbind())
}

/// Domain wall partition function of the 8VSOS model at `q = ω`.
#[pyfunction]
fn partition_z(u: Vec<C64>, v: Vec<C64>, lam: C64, nome: PyNome) -> PyResult<C64> {
    let params = sos::SosParams::at_omega(u, v, lam, nome.0).map_err(py_err)?;
    sos::partition_z(&params).map_err(py_err)
}

/// Three-colour partition function with weights `t_j = θ(λω^j; p)^{−3}`.
#[pyfunction]
fn three_colour_z(n: usize, lam: C64, nome: PyNome) -> PyResult<C64> {
    let w = sos::ThreeColourWeights::from_lambda(lam, &nome.0).map_err(py_err)?;
    sos::three_colour_z(n, &w).map_err(py_err)
}

/// Number of height matrices of size `n`.
#[pyfunction]
fn state_count(n: usize) -> PyResult<usize> {
    sos::enumerate_states(n).map(|s| s.len()).map_err(py_err)
}

/// Runs a named suite and returns its JSON report.
#[pyfunction]
#[pyo3(signature = (suite, seed = 42, tol = 1.0))]
fn verify(py: Python<'_>, suite: &str, seed: u64, tol: f64) -> PyResult<String> {
    let suite = Suite::from_str(suite).map_err(|e| PyValueError::new_err(e.to_string()))?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(PyValueError::new_err("tol must be a positive multiplier"));
    }
    Ok(py.detach(|| run_suite(suite, seed, tol, false).to_json()))
}

#[pymodule]
fn ellpf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNome>()?;
    m.add_class::<PyChain>()?;
    m.add("EllpfError", m.py().get_type::<EllpfError>())?;
    m.add("DegeneracyError", m.py().get_type::<DegeneracyError>())?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    m.add_function(wrap_pyfunction!(theta_jacobi, m)?)?;
    m.add_function(wrap_pyfunction!(pfaffian, m)?)?;
    m.add_function(wrap_pyfunction!(p_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(hankel, m)?)?;
    m.add_function(wrap_pyfunction!(glaisher_t, m)?)?;
    m.add_function(wrap_pyfunction!(partition_z, m)?)?;
    m.add_function(wrap_pyfunction!(three_colour_z, m)?)?;
    m.add_function(wrap_pyfunction!(state_count, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

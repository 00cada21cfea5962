//! Python bindings. Reports come back as plain dicts and lists; configs are
//! passed as TOML text, the same format the command-line tool reads.

use std::path::Path;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use rarefaction::cli::{self, Config};
use rarefaction::{riemann1d, GasLaw, PrimitiveState};

fn err(e: rarefaction::Error) -> PyErr {
    if e.is_usage() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn to_py<T: serde::Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

fn law(gamma: f64, k0: f64) -> PyResult<GasLaw> {
    GasLaw::new(gamma, k0).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn state(s: (f64, f64, f64)) -> PrimitiveState {
    PrimitiveState::new(s.0, s.1, s.2)
}

fn config(toml: &str) -> PyResult<Config> {
    cli::parse_config(toml).map_err(err)
}

/// Riemann invariants (w̄, w, ψ₂) of a state (ρ, v1, v2).
#[pyfunction]
#[pyo3(signature = (rho, v1, v2=0.0, gamma=2.0, k0=0.5))]
fn invariants(rho: f64, v1: f64, v2: f64, gamma: f64, k0: f64) -> PyResult<(f64, f64, f64)> {
    let i = law(gamma, k0)?.to_invariants(&PrimitiveState::new(rho, v1, v2)).map_err(err)?;
    Ok((i.wbar, i.w, i.psi2))
}

/// Exact Riemann fan of two states given as (ρ, v1, v2).
#[pyfunction]
#[pyo3(signature = (left, right, gamma=2.0, k0=0.5))]
fn solve_riemann(py: Python<'_>, left: (f64, f64, f64), right: (f64, f64, f64), gamma: f64, k0: f64) -> PyResult<Py<PyAny>> {
    let fan = riemann1d::solve(&law(gamma, k0)?, &state(left), &state(right)).map_err(err)?;
    to_py(py, &cli::FanReport::of(&fan))
}

/// Self-similar profile (ρ, v1, v2) at each ξ = x1/t.
#[pyfunction]
#[pyo3(signature = (left, right, xi, gamma=2.0, k0=0.5))]
fn sample_fan(
    left: (f64, f64, f64),
    right: (f64, f64, f64),
    xi: Vec<f64>,
    gamma: f64,
    k0: f64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let fan = riemann1d::solve(&law(gamma, k0)?, &state(left), &state(right)).map_err(err)?;
    Ok(xi.iter().map(|&x| fan.sample(x)).map(|p| (p.rho, p.v1, p.v2)).collect())
}

/// Default config as TOML text.
#[pyfunction]
fn default_config() -> String {
    Config::default().to_toml()
}

#[pyfunction]
fn simulate2d(py: Python<'_>, config_toml: &str, out_dir: &str) -> PyResult<Py<PyAny>> {
    let s = cli::run_simulate2d(&config(config_toml)?, Path::new(out_dir)).map_err(err)?;
    to_py(py, &s)
}

#[pyfunction]
fn build_data(py: Python<'_>, config_toml: &str, out_dir: &str) -> PyResult<Py<PyAny>> {
    let r = cli::run_build_data(&config(config_toml)?, Path::new(out_dir)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn trace_fronts(py: Python<'_>, config_toml: &str, out_dir: &str) -> PyResult<Py<PyAny>> {
    let r = cli::run_trace_fronts(&config(config_toml)?, Path::new(out_dir)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn verify_entropy(py: Python<'_>, config_toml: &str, out_dir: &str) -> PyResult<Py<PyAny>> {
    let r = cli::run_verify_entropy(&config(config_toml)?, Path::new(out_dir)).map_err(err)?;
    to_py(py, &r)
}

#[pymodule]
fn rarefaction_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(solve_riemann, m)?)?;
    m.add_function(wrap_pyfunction!(sample_fan, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_function(wrap_pyfunction!(simulate2d, m)?)?;
    m.add_function(wrap_pyfunction!(build_data, m)?)?;
    m.add_function(wrap_pyfunction!(trace_fronts, m)?)?;
    m.add_function(wrap_pyfunction!(verify_entropy, m)?)?;
    Ok(())
}

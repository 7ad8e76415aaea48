//! Python bindings. Scenes and results cross the boundary as JSON strings, the
//! same format the command-line tool reads and writes.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use semialg::cli::{self, Failure};
use semialg::poly::{isolate_real_roots, Interval, Polynomial};
use semialg::render::{render_svg, RenderStyle};
use semialg::scene::{parse_scene, Scene};

fn err(f: Failure) -> PyErr {
    match f {
        Failure::Compute(..) => PyRuntimeError::new_err(f.to_string()),
        _ => PyValueError::new_err(f.to_string()),
    }
}

fn load(scene_json: &str) -> PyResult<Scene> {
    parse_scene(scene_json).map(|(s, _)| s).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Cell complex of a scene, as JSON.
#[pyfunction]
fn decompose(scene_json: &str) -> PyResult<String> {
    let out = cli::decompose(&load(scene_json)?).map_err(err)?;
    serde_json::to_string(&out).map_err(json_err)
}

#[pyfunction]
fn classify(scene_json: &str) -> PyResult<String> {
    let out = cli::classify(&load(scene_json)?).map_err(err)?;
    serde_json::to_string(&out).map_err(json_err)
}

/// Shortest curve between two points; returns `(curve_json, length)`.
#[pyfunction]
fn geodesic(scene_json: &str, start: (f64, f64), end: (f64, f64)) -> PyResult<(String, f64)> {
    let c = cli::shortest_curve(&load(scene_json)?, [start.0, start.1], [end.0, end.1]).map_err(err)?;
    Ok((serde_json::to_string(&c).map_err(json_err)?, c.length()))
}

/// Runs the property suites; returns `(passed, report_json)`.
#[pyfunction]
#[pyo3(signature = (scene_json, grid=256))]
fn verify(scene_json: &str, grid: usize) -> PyResult<(bool, String)> {
    let r = cli::verify(&load(scene_json)?, grid).map_err(err)?;
    Ok((r.pass, serde_json::to_string(&r).map_err(json_err)?))
}

#[pyfunction]
#[pyo3(signature = (scene_json, start=None, end=None))]
fn render(scene_json: &str, start: Option<(f64, f64)>, end: Option<(f64, f64)>) -> PyResult<String> {
    let scene = load(scene_json)?;
    let complex = cli::decompose(&scene).map_err(err)?;
    let curves = match (start, end) {
        (Some(a), Some(b)) => vec![cli::shortest_curve(&scene, [a.0, a.1], [b.0, b.1]).map_err(err)?],
        (None, None) => Vec::new(),
        _ => return Err(PyValueError::new_err("start and end go together")),
    };
    String::from_utf8(render_svg(&complex, &curves, &RenderStyle::default())).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Real roots in `[lo, hi]` of the polynomial with coefficients `coeffs` (constant first).
#[pyfunction]
#[pyo3(signature = (coeffs, lo, hi, tol=1e-12))]
fn real_roots(coeffs: Vec<f64>, lo: f64, hi: f64, tol: f64) -> PyResult<Vec<f64>> {
    let roots = isolate_real_roots(&Polynomial::new(coeffs), Interval { lo, hi }, tol).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(roots.into_iter().map(|r| r.x).collect())
}

#[pyfunction]
fn arc_length(coeffs: Vec<f64>, a: f64, b: f64) -> f64 {
    Polynomial::new(coeffs).arc_length(a, b)
}

#[pymodule]
fn semialg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    m.add_function(wrap_pyfunction!(real_roots, m)?)?;
    m.add_function(wrap_pyfunction!(arc_length, m)?)?;
    Ok(())
}

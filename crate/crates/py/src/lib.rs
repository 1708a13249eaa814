//! Python bindings. Build with `--features extension-module` and import as
//! `stark_window_py`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use stark_window::fd2d::{inner_grid, solve_refined, window_ground_state, WindowBC};
use stark_window::{bracket, transverse, BoundaryType, Error};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidParams(m) => PyValueError::new_err(m),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn parse_bc(bc: &str) -> PyResult<BoundaryType> {
    match bc {
        "dirichlet" => Ok(BoundaryType::DirichletDirichlet),
        "mixed" => Ok(BoundaryType::NeumannDirichlet),
        _ => Err(PyValueError::new_err(format!("bc must be 'dirichlet' or 'mixed', got {bc:?}"))),
    }
}

#[pyclass(name = "WaveguideParams", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyParams(stark_window::WaveguideParams);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (F, d, a=1.0))]
    #[allow(non_snake_case)]
    fn new(F: f64, d: f64, a: f64) -> PyResult<Self> {
        stark_window::WaveguideParams::new(F, d, a).map(Self).map_err(to_py)
    }

    #[getter(F)]
    fn field(&self) -> f64 {
        self.0.f
    }

    #[getter]
    fn d(&self) -> f64 {
        self.0.d
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }

    fn __repr__(&self) -> String {
        format!("WaveguideParams(F={}, d={}, a={})", self.0.f, self.0.d, self.0.a)
    }
}

#[pyclass(name = "TransverseLevel", frozen)]
struct PyLevel(stark_window::TransverseLevel);

#[pymethods]
impl PyLevel {
    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn eigenvalue(&self) -> f64 {
        self.0.lambda
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta
    }

    fn value(&self, z: f64) -> f64 {
        self.0.value(z)
    }

    fn derivative(&self, z: f64) -> f64 {
        self.0.derivative(z)
    }

    fn __repr__(&self) -> String {
        format!("TransverseLevel(n={}, eigenvalue={})", self.0.n, self.0.lambda)
    }
}

#[pyfunction]
#[pyo3(signature = (params, bc="dirichlet", count=3))]
fn levels(params: &PyParams, bc: &str, count: usize) -> PyResult<Vec<PyLevel>> {
    let v = transverse::levels(&params.0, parse_bc(bc)?, count).map_err(to_py)?;
    Ok(v.into_iter().map(PyLevel).collect())
}

/// `(lower, upper)` of the interval holding the discrete spectrum.
#[pyfunction]
fn window(params: &PyParams) -> PyResult<(f64, f64)> {
    let w = bracket::window(&params.0).map_err(to_py)?;
    Ok((w.lower, w.upper))
}

#[pyfunction]
#[pyo3(signature = (params, i=1))]
fn sufficient_radius(params: &PyParams, i: usize) -> PyResult<f64> {
    bracket::sufficient_radius(&params.0, i).map_err(to_py)
}

#[pyfunction]
fn count_certified(params: &PyParams) -> PyResult<usize> {
    bracket::count_certified(&params.0).map_err(to_py)
}

/// Rows `(a, [curve_1..curve_i_max], edge)`.
#[pyfunction]
#[pyo3(signature = (params, a_min, a_max, steps=200, i_max=3))]
fn figure_curves(params: &PyParams, a_min: f64, a_max: f64, steps: usize, i_max: usize) -> PyResult<Vec<(f64, Vec<f64>, f64)>> {
    let t = bracket::figure_curves(&params.0, a_min, a_max, steps, i_max).map_err(to_py)?;
    Ok(t.rows.into_iter().map(|r| (r.a, r.curves, r.edge)).collect())
}

#[pyfunction]
fn certify<'py>(py: Python<'py>, params: &PyParams) -> PyResult<Bound<'py, PyDict>> {
    let c = stark_window::certify::certify(&params.0).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("q_value", c.q_value)?;
    out.set_item("valid", c.is_valid())?;
    out.set_item("tau", c.spec.tau)?;
    out.set_item("eps", c.spec.eps)?;
    out.set_item("coeff_a", c.coeff_a)?;
    out.set_item("coeff_b", c.coeff_b)?;
    out.set_item("coeff_c", c.coeff_c)?;
    out.set_item("decomposition", c.decomposition())?;
    Ok(out)
}

/// Lowest eigenvalues of the axisymmetric problem. `window` is one of
/// `truncated`, `inner-dirichlet`, `inner-neumann`; `nr` counts cells
/// across the window.
#[pyfunction]
#[pyo3(signature = (params, window="truncated", count=1, nr=32, nz=32, r_max=8.0, m=0))]
fn solve2d<'py>(
    py: Python<'py>,
    params: &PyParams,
    window: &str,
    count: usize,
    nr: usize,
    nz: usize,
    r_max: f64,
    m: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let p = params.0;
    let out = PyDict::new(py);
    let (values, est, res) = match window {
        "truncated" => {
            if m != 0 {
                return Err(PyValueError::new_err("the truncated problem is solved for m = 0 only"));
            }
            let g = window_ground_state(&p, r_max * p.a, nr, nz, count).map_err(to_py)?;
            out.set_item("bound_state", g.below_edge)?;
            (g.result.values, g.error_estimate, g.result.residuals)
        }
        "inner-dirichlet" | "inner-neumann" => {
            let bc = if window == "inner-dirichlet" { WindowBC::InnerDirichlet } else { WindowBC::InnerNeumann };
            let grid = inner_grid(&p, nr, nz).map_err(to_py)?;
            let r = solve_refined(&p, &grid, bc, m, count).map_err(to_py)?;
            (r.fine.values, r.error_estimate, r.fine.residuals)
        }
        _ => return Err(PyValueError::new_err(format!("unknown window {window:?}"))),
    };
    out.set_item("values", values)?;
    out.set_item("error_estimate", est)?;
    out.set_item("residuals", res)?;
    Ok(out)
}

#[pymodule]
fn stark_window_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyLevel>()?;
    m.add_function(wrap_pyfunction!(levels, m)?)?;
    m.add_function(wrap_pyfunction!(window, m)?)?;
    m.add_function(wrap_pyfunction!(sufficient_radius, m)?)?;
    m.add_function(wrap_pyfunction!(count_certified, m)?)?;
    m.add_function(wrap_pyfunction!(figure_curves, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(solve2d, m)?)?;
    Ok(())
}

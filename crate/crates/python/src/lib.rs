//! Python bindings for the radial solver. Fields cross the boundary as
//! lists of floats sampled at `Grid.nodes`.

use kgmp::asymptotics;
use kgmp::energy as en;
use kgmp::gauge;
use kgmp::mountainpass::{self as mp, MPConfig};
use kgmp::{build_grid, Field, Geometry, KgmpError, RadialGrid};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(kgmp_py, SolverError, PyException);
create_exception!(kgmp_py, HypothesisError, PyValueError);

fn to_py(err: KgmpError) -> PyErr {
    match err {
        KgmpError::HypothesisViolated(_) => HypothesisError::new_err(err.to_string()),
        KgmpError::InvalidParams(_) | KgmpError::Domain(_) | KgmpError::GridMismatch { .. } => {
            PyValueError::new_err(err.to_string())
        }
        _ => SolverError::new_err(err.to_string()),
    }
}

#[pyclass(name = "Grid", frozen)]
struct PyGrid {
    inner: RadialGrid,
}

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (n, intervals=200, grading=1.0, kind="sphere", r_max=1.0))]
    fn new(n: usize, intervals: usize, grading: f64, kind: &str, r_max: f64) -> PyResult<Self> {
        let geometry = match kind {
            "sphere" => Geometry::sphere(n),
            "ball" => Geometry::ball(n, r_max),
            other => return Err(PyValueError::new_err(format!("unknown geometry kind {other:?}"))),
        }
        .map_err(to_py)?;
        let inner = build_grid(geometry, intervals, grading).map_err(to_py)?;
        Ok(PyGrid { inner })
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.inner.nodes.clone()
    }

    #[getter]
    fn cell_weights(&self) -> Vec<f64> {
        self.inner.cell_weights.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Weighted integral of a nodal field.
    fn integrate(&self, f: Vec<f64>) -> PyResult<f64> {
        kgmp::integrate(&self.inner, &Field::new(f)).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(n={}, intervals={}, r_max={})",
            self.inner.dim(),
            self.inner.intervals(),
            self.inner.geometry.r_max
        )
    }
}

#[pyclass(name = "Params", frozen)]
struct PyParams {
    inner: kgmp::Params,
}

#[pymethods]
impl PyParams {
    /// `p` defaults to the critical exponent `2n/(n-2)`.
    #[new]
    #[pyo3(signature = (n, m0, m1, q, omega=0.0, p=None))]
    fn new(n: usize, m0: f64, m1: f64, q: f64, omega: f64, p: Option<f64>) -> PyResult<Self> {
        let inner = match p {
            Some(p) => kgmp::Params::new(n, p, m0, m1, q, omega),
            None => kgmp::Params::critical(n, m0, m1, q, omega),
        }
        .map_err(to_py)?;
        Ok(PyParams { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p
    }

    #[getter]
    fn m0(&self) -> f64 {
        self.inner.m0
    }

    #[getter]
    fn m1(&self) -> f64 {
        self.inner.m1
    }

    #[getter]
    fn q(&self) -> f64 {
        self.inner.q
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "Params(n={}, p={}, m0={}, m1={}, q={}, omega={})",
            p.n, p.p, p.m0, p.m1, p.q, p.omega
        )
    }
}

#[pyclass(name = "Energy", frozen, get_all)]
struct PyEnergy {
    dirichlet: f64,
    mass: f64,
    nonlinear: f64,
    gauge_coupling: f64,
    total: f64,
}

#[pyclass(name = "SolveResult", frozen, get_all)]
struct PySolveResult {
    u: Vec<f64>,
    v: Vec<f64>,
    level: f64,
    residual: f64,
    newton_iters: usize,
    path_iters: usize,
    min_u: f64,
    accepted: bool,
}

impl From<mp::SolveReport> for PySolveResult {
    fn from(r: mp::SolveReport) -> Self {
        PySolveResult {
            residual: r.residual(),
            accepted: r.is_accepted(),
            level: r.level_c,
            newton_iters: r.newton_iters,
            path_iters: r.path_iters,
            min_u: r.min_u,
            u: r.u.values,
            v: r.v.values,
        }
    }
}

fn field(grid: &PyGrid, values: Vec<f64>) -> PyResult<Field> {
    let f = Field::new(values);
    grid.inner.check(&f).map_err(to_py)?;
    Ok(f)
}

/// Gauge potential `Phi(u)`.
#[pyfunction]
fn solve_gauge(grid: &PyGrid, params: &PyParams, u: Vec<f64>) -> PyResult<Vec<f64>> {
    let u = field(grid, u)?;
    let result = gauge::solve_gauge(&grid.inner, &params.inner, &u).map_err(to_py)?;
    Ok(result.v.values)
}

#[pyfunction]
fn energy(grid: &PyGrid, params: &PyParams, u: Vec<f64>) -> PyResult<PyEnergy> {
    let u = field(grid, u)?;
    let e = en::energy(&grid.inner, &params.inner, &u).map_err(to_py)?;
    Ok(PyEnergy {
        dirichlet: e.dirichlet,
        mass: e.mass,
        nonlinear: e.nonlinear,
        gauge_coupling: e.gauge_coupling,
        total: e.total,
    })
}

/// Gradient of the reduced energy in the weighted inner product.
#[pyfunction]
fn grad_energy(grid: &PyGrid, params: &PyParams, u: Vec<f64>) -> PyResult<Vec<f64>> {
    let u = field(grid, u)?;
    let g = en::grad_energy(&grid.inner, &params.inner, &u).map_err(to_py)?;
    Ok(g.values)
}

/// Mountain-pass search followed by Newton refinement of the coupled system.
#[pyfunction]
#[pyo3(signature = (grid, params, seed=None, grad_tol=None, max_outer_iters=None))]
fn mountain_pass(
    py: Python<'_>,
    grid: &PyGrid,
    params: &PyParams,
    seed: Option<Vec<f64>>,
    grad_tol: Option<f64>,
    max_outer_iters: Option<usize>,
) -> PyResult<PySolveResult> {
    let seed = match seed {
        Some(s) => field(grid, s)?,
        None => mp::default_seed(&grid.inner).map_err(to_py)?,
    };
    let mut cfg = MPConfig::default();
    if let Some(t) = grad_tol {
        cfg.grad_tol = t;
    }
    if let Some(k) = max_outer_iters {
        cfg.max_outer_iters = k;
    }
    cfg.validate().map_err(to_py)?;
    let (g, p) = (&grid.inner, &params.inner);
    let report = py.detach(|| mp::mountain_pass(g, p, &seed, &cfg)).map_err(to_py)?;
    Ok(report.into())
}

/// Newton iteration on the coupled system from `(u0, v0)`.
#[pyfunction]
fn newton_refine(
    grid: &PyGrid,
    params: &PyParams,
    u0: Vec<f64>,
    v0: Vec<f64>,
) -> PyResult<PySolveResult> {
    let (u0, v0) = (field(grid, u0)?, field(grid, v0)?);
    let report = mp::newton_refine(&grid.inner, &params.inner, &u0, &v0).map_err(to_py)?;
    Ok(report.into())
}

/// Constant solution `(c, v)` of the coupled system on the sphere, if any.
#[pyfunction]
fn constant_solution(params: &PyParams) -> Option<(f64, f64)> {
    mp::constant_solution(&params.inner)
}

/// Phase-compensation ratio of the bubble of width `mu`.
#[pyfunction]
#[pyo3(signature = (params, mu, intervals=20_000))]
fn phase_ratio(params: &PyParams, mu: f64, intervals: usize) -> PyResult<f64> {
    let report = asymptotics::phase_ratio(&params.inner, mu, intervals).map_err(to_py)?;
    Ok(report.ratio)
}

/// Nodal values of the bubble of width `mu`.
#[pyfunction]
fn bubble(grid: &PyGrid, mu: f64) -> PyResult<Vec<f64>> {
    let spec = asymptotics::BubbleSpec::new(mu, grid.inner.dim()).map_err(to_py)?;
    Ok(asymptotics::bubble(&grid.inner, &spec).values)
}

#[pyfunction]
fn sobolev_constant(n: usize) -> PyResult<f64> {
    en::sobolev_kn(n).map_err(to_py)
}

#[pyfunction]
fn mp_threshold(n: usize) -> PyResult<f64> {
    en::mp_threshold(n).map_err(to_py)
}

#[pymodule]
fn kgmp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    m.add("HypothesisError", m.py().get_type::<HypothesisError>())?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyEnergy>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(solve_gauge, m)?)?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add_function(wrap_pyfunction!(grad_energy, m)?)?;
    m.add_function(wrap_pyfunction!(mountain_pass, m)?)?;
    m.add_function(wrap_pyfunction!(newton_refine, m)?)?;
    m.add_function(wrap_pyfunction!(constant_solution, m)?)?;
    m.add_function(wrap_pyfunction!(phase_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(bubble, m)?)?;
    m.add_function(wrap_pyfunction!(sobolev_constant, m)?)?;
    m.add_function(wrap_pyfunction!(mp_threshold, m)?)?;
    Ok(())
}

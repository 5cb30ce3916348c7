//! Python bindings for `ds2sim`.
//!
//! Fields are passed around as `Field` objects holding spectral
//! coefficients; physical values cross the boundary as flat lists of
//! complex numbers in row-major order (x slow, y fast).

use ds2sim::diagnostics::compute_diagnostics;
use ds2sim::image::emit_amplitude_image;
use ds2sim::snapshot::{read_snapshot, write_snapshot};
use ds2sim::{Complex64, Error, NullSink, SobolevExponent, StepReport as CoreReport};
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::NonFinite { .. } | Error::Rejected { .. } | Error::NoContraction { .. } => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn exponent(p: f64) -> PyResult<SobolevExponent> {
    SobolevExponent::new(p).map_err(to_py)
}

#[pyclass(name = "Grid", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyGrid(ds2sim::Grid2D);

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (nx, ny, lx = 2.0 * std::f64::consts::PI, ly = 2.0 * std::f64::consts::PI))]
    fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> PyResult<Self> {
        ds2sim::Grid2D::new(nx, ny, lx, ly)
            .map(PyGrid)
            .map_err(to_py)
    }

    #[getter]
    fn nx(&self) -> usize {
        self.0.nx()
    }

    #[getter]
    fn ny(&self) -> usize {
        self.0.ny()
    }

    #[getter]
    fn lx(&self) -> f64 {
        self.0.lx()
    }

    #[getter]
    fn ly(&self) -> f64 {
        self.0.ly()
    }

    /// Physical coordinates `(x, y)` of every sample in storage order.
    fn points(&self) -> Vec<(f64, f64)> {
        let g = &self.0;
        (0..g.nx())
            .flat_map(|j| (0..g.ny()).map(move |l| (g.x(j), g.y(l))))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid({}, {}, {}, {})",
            self.0.nx(),
            self.0.ny(),
            self.0.lx(),
            self.0.ly()
        )
    }
}

#[pyclass(name = "Field", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyField(ds2sim::SpectralField);

#[pymethods]
impl PyField {
    /// Build a field from spectral coefficients in storage order.
    #[new]
    fn new(grid: &PyGrid, coeffs: Vec<Complex64>) -> PyResult<Self> {
        ds2sim::SpectralField::new(grid.0, coeffs)
            .map(PyField)
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_physical(grid: &PyGrid, values: Vec<Complex64>) -> PyResult<Self> {
        ds2sim::forward_transform(&grid.0, &values)
            .map(PyField)
            .map_err(to_py)
    }

    #[staticmethod]
    fn zeros(grid: &PyGrid) -> Self {
        PyField(ds2sim::SpectralField::zeros(grid.0))
    }

    #[staticmethod]
    fn plane_wave(grid: &PyGrid, amplitude: Complex64, j: isize, l: isize) -> Self {
        PyField(ds2sim::SpectralField::single_mode(grid.0, j, l, amplitude))
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    fn coeffs(&self) -> Vec<Complex64> {
        self.0.coeffs().to_vec()
    }

    fn to_physical(&self) -> Vec<Complex64> {
        self.0.to_physical()
    }

    fn mode(&self, j: isize, l: isize) -> Complex64 {
        self.0.mode(j, l)
    }

    fn mass(&self) -> f64 {
        self.0.mass()
    }

    fn sobolev_norm(&self, p: f64) -> PyResult<f64> {
        Ok(ds2sim::sobolev_norm(&self.0, exponent(p)?))
    }

    fn __repr__(&self) -> String {
        let g = self.0.grid();
        format!("Field({}x{}, mass={:e})", g.nx(), g.ny(), self.0.mass())
    }
}

#[pyclass(name = "Params", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyParams(ds2sim::DS2Params);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (gamma, lambda_, mu, p = 1.5, dealias = false))]
    fn new(gamma: f64, lambda_: f64, mu: f64, p: f64, dealias: bool) -> PyResult<Self> {
        ds2sim::DS2Params::new(gamma, lambda_, mu, p)
            .map(|d| PyParams(d.with_dealias(dealias)))
            .map_err(to_py)
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.0.lambda
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.0.mu
    }

    #[getter]
    fn p(&self) -> f64 {
        self.0.p.value()
    }

    #[getter]
    fn dealias(&self) -> bool {
        self.0.dealias
    }

    fn __repr__(&self) -> String {
        let d = &self.0;
        format!(
            "Params(gamma={}, lambda_={}, mu={}, p={})",
            d.gamma,
            d.lambda,
            d.mu,
            d.p.value()
        )
    }
}

#[pyclass(name = "PicardConfig", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPicardConfig(ds2sim::PicardConfig);

#[pymethods]
impl PyPicardConfig {
    #[new]
    #[pyo3(signature = (quad_nodes = 8, tol = 1e-11, theta = 0.5, max_iters = 50, p = 1.5))]
    fn new(quad_nodes: usize, tol: f64, theta: f64, max_iters: usize, p: f64) -> PyResult<Self> {
        let cfg = ds2sim::PicardConfig {
            quad_nodes,
            tol,
            theta,
            max_iters,
            p: exponent(p)?,
        };
        cfg.validate().map_err(to_py)?;
        Ok(PyPicardConfig(cfg))
    }

    #[getter]
    fn quad_nodes(&self) -> usize {
        self.0.quad_nodes
    }

    #[getter]
    fn tol(&self) -> f64 {
        self.0.tol
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta
    }

    #[getter]
    fn max_iters(&self) -> usize {
        self.0.max_iters
    }
}

#[pyclass(name = "StepReport", frozen, get_all, skip_from_py_object)]
struct PyStepReport {
    iters: usize,
    final_residual: f64,
    contraction_ratios: Vec<f64>,
    accepted: bool,
}

#[pymethods]
impl PyStepReport {
    fn max_ratio(&self) -> f64 {
        self.contraction_ratios.iter().copied().fold(0.0, f64::max)
    }

    fn __repr__(&self) -> String {
        format!(
            "StepReport(iters={}, final_residual={:e}, accepted={})",
            self.iters, self.final_residual, self.accepted
        )
    }
}

impl From<CoreReport> for PyStepReport {
    fn from(r: CoreReport) -> Self {
        PyStepReport {
            iters: r.iters,
            final_residual: r.final_residual,
            contraction_ratios: r.contraction_ratios,
            accepted: r.accepted,
        }
    }
}

fn config_or_default(cfg: Option<&PyPicardConfig>) -> ds2sim::PicardConfig {
    cfg.map(|c| c.0).unwrap_or_default()
}

#[pyfunction]
fn free_evolve(u: &PyField, t: f64) -> PyField {
    PyField(ds2sim::free_evolve(&u.0, t))
}

#[pyfunction]
fn phi_x(u: &PyField, mu: f64) -> PyField {
    PyField(ds2sim::phi_x_from_u(&u.0, mu))
}

#[pyfunction]
fn nonlinear_n(u: &PyField, params: &PyParams) -> PyField {
    PyField(ds2sim::nonlinear_n(&u.0, &params.0))
}

#[pyfunction]
#[pyo3(signature = (u, params, allow_large = false))]
fn convolution_oracle_n(u: &PyField, params: &PyParams, allow_large: bool) -> PyResult<PyField> {
    ds2sim::convolution_oracle_n(&u.0, &params.0, allow_large)
        .map(PyField)
        .map_err(to_py)
}

#[pyfunction]
fn sobolev_norm(u: &PyField, p: f64) -> PyResult<f64> {
    Ok(ds2sim::sobolev_norm(&u.0, exponent(p)?))
}

/// Returns `(||fg||, ||fg|| / (||f|| ||g||))` in `H^p`.
#[pyfunction]
fn algebra_check(f: &PyField, g: &PyField, p: f64) -> PyResult<(f64, f64)> {
    ds2sim::algebra_check(&f.0, &g.0, exponent(p)?).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (u, dt, params, config = None))]
fn picard_step(
    u: &PyField,
    dt: f64,
    params: &PyParams,
    config: Option<&PyPicardConfig>,
) -> PyResult<(PyField, PyStepReport)> {
    let (out, report) =
        ds2sim::picard_step(&u.0, dt, &params.0, &config_or_default(config)).map_err(to_py)?;
    Ok((PyField(out), report.into()))
}

/// Evolve to `t_end`; returns the final field and one report per step.
#[pyfunction]
#[pyo3(signature = (u0, t_end, dt, params, config = None))]
fn evolve(
    py: Python<'_>,
    u0: &PyField,
    t_end: f64,
    dt: f64,
    params: &PyParams,
    config: Option<&PyPicardConfig>,
) -> PyResult<(PyField, Vec<PyStepReport>)> {
    let cfg = config_or_default(config);
    let (u0, params) = (u0.0.clone(), params.0);
    let traj = py
        .detach(|| ds2sim::evolve(&u0, t_end, dt, &params, &cfg, &mut NullSink))
        .map_err(to_py)?;
    let reports = traj.reports.into_iter().map(Into::into).collect();
    Ok((PyField(traj.state), reports))
}

#[pyfunction]
fn split_step_reference(u0: &PyField, t_end: f64, dt: f64, params: &PyParams) -> PyResult<PyField> {
    ds2sim::split_step_reference(&u0.0, t_end, dt, &params.0)
        .map(PyField)
        .map_err(to_py)
}

/// Returns `(T_star, [(T, max_ratio, contracting), ...])`.
#[pyfunction]
#[pyo3(signature = (u0, params, t_max, config = None))]
fn existence_time_estimate(
    u0: &PyField,
    params: &PyParams,
    t_max: f64,
    config: Option<&PyPicardConfig>,
) -> PyResult<(f64, Vec<(f64, f64, bool)>)> {
    let (t, report) =
        ds2sim::existence_time_estimate(&u0.0, &params.0, &config_or_default(config), t_max)
            .map_err(to_py)?;
    let curve = report
        .ratio_curve()
        .into_iter()
        .map(|p| (p.t, p.max_ratio, p.accepted))
        .collect();
    Ok((t, curve))
}

#[pyfunction]
fn diagnostics<'py>(
    py: Python<'py>,
    u: &PyField,
    t: f64,
    params: &PyParams,
) -> PyResult<Bound<'py, PyDict>> {
    let rec = compute_diagnostics(&u.0, t, &params.0, params.0.p);
    let d = PyDict::new(py);
    d.set_item("t", rec.t)?;
    d.set_item("mass", rec.mass)?;
    d.set_item("hp_norm", rec.hp_norm)?;
    d.set_item("linf", rec.linf)?;
    d.set_item("boundary_leak", rec.boundary_leak)?;
    d.set_item("phi_x_linf", rec.phi_x_linf)?;
    Ok(d)
}

#[pyfunction(name = "write_snapshot")]
fn py_write_snapshot(u: &PyField, t: f64, path: std::path::PathBuf) -> PyResult<()> {
    write_snapshot(&u.0, t, path).map_err(to_py)
}

/// Returns `(field, t)`.
#[pyfunction(name = "read_snapshot")]
fn py_read_snapshot(path: std::path::PathBuf) -> PyResult<(PyField, f64)> {
    read_snapshot(path)
        .map(|(f, t)| (PyField(f), t))
        .map_err(to_py)
}

#[pyfunction]
fn write_amplitude_image(u: &PyField, path: std::path::PathBuf) -> PyResult<()> {
    emit_amplitude_image(&u.0, path).map_err(to_py)
}

#[pymodule]
fn pyds2(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyPicardConfig>()?;
    m.add_class::<PyStepReport>()?;
    m.add_function(wrap_pyfunction!(free_evolve, m)?)?;
    m.add_function(wrap_pyfunction!(phi_x, m)?)?;
    m.add_function(wrap_pyfunction!(nonlinear_n, m)?)?;
    m.add_function(wrap_pyfunction!(convolution_oracle_n, m)?)?;
    m.add_function(wrap_pyfunction!(sobolev_norm, m)?)?;
    m.add_function(wrap_pyfunction!(algebra_check, m)?)?;
    m.add_function(wrap_pyfunction!(picard_step, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(split_step_reference, m)?)?;
    m.add_function(wrap_pyfunction!(existence_time_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(diagnostics, m)?)?;
    m.add_function(wrap_pyfunction!(py_write_snapshot, m)?)?;
    m.add_function(wrap_pyfunction!(py_read_snapshot, m)?)?;
    m.add_function(wrap_pyfunction!(write_amplitude_image, m)?)?;
    Ok(())
}

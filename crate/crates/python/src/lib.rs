//! Python bindings.

use std::collections::BTreeMap;

use hammerlip_core::chains::{longest_chain_lipschitz, optimal_support_lipschitz};
use hammerlip_core::experiments::{self as exp, ExperimentSpec};
use hammerlip_core::geometry::{self as geo, max_inscribed_rectangle, PlanarPoint};
use hammerlip_core::sampler::{self, child_seed as core_child_seed};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: hammerlip_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

type Pt = (f64, f64);

fn pt(p: &PlanarPoint) -> Pt {
    (p.x, p.y)
}

#[pyclass(name = "SlopeBand", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PySlopeBand {
    inner: geo::SlopeBand,
}

#[pymethods]
impl PySlopeBand {
    #[new]
    #[pyo3(signature = (alpha = 0.0, beta = f64::INFINITY))]
    fn new(alpha: f64, beta: f64) -> PyResult<Self> {
        Ok(Self { inner: geo::SlopeBand::new(alpha, beta).map_err(err)? })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    fn is_finite(&self) -> bool {
        self.inner.is_finite()
    }

    fn classify(&self, a: f64, b: f64) -> &'static str {
        geo::classify(a, b, self.inner).name()
    }

    fn limiting_shape(&self, a: f64, b: f64) -> PyResult<f64> {
        geo::limiting_shape(a, b, self.inner).map_err(err)
    }

    /// `(m11, m12, m21, m22)` of the map to dominance coordinates.
    fn phi(&self) -> PyResult<(f64, f64, f64, f64)> {
        let m = geo::phi_map(self.inner).map_err(err)?;
        Ok((m.m11, m.m12, m.m21, m.m22))
    }

    fn order_holds(&self, p: Pt, q: Pt) -> bool {
        geo::order_holds(p.into(), q.into(), self.inner)
    }

    fn __repr__(&self) -> String {
        format!("SlopeBand(alpha={}, beta={})", self.inner.alpha(), self.inner.beta())
    }
}

fn band_or_classical(band: Option<PyRef<'_, PySlopeBand>>) -> geo::SlopeBand {
    band.map_or(geo::SlopeBand::classical(), |b| b.inner)
}

#[pyclass(name = "PointCloud", frozen)]
struct PyPointCloud {
    inner: sampler::PointCloud,
}

#[pymethods]
impl PyPointCloud {
    /// Poisson sample on `[0, width] x [0, height]`.
    #[staticmethod]
    #[pyo3(signature = (width, height, intensity = 1.0, seed = 0))]
    fn sample_rect(width: f64, height: f64, intensity: f64, seed: u64) -> PyResult<Self> {
        let rect = geo::Rect::origin(width, height).map_err(err)?;
        Ok(Self { inner: sampler::sample_poisson_rect(&rect, intensity, seed).map_err(err)? })
    }

    #[staticmethod]
    fn from_points(points: Vec<Pt>) -> Self {
        Self { inner: sampler::PointCloud::from_points(points.into_iter().map(PlanarPoint::from).collect()) }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn points(&self) -> Vec<Pt> {
        self.inner.points.iter().map(pt).collect()
    }

    /// `(length, path)`; dominance order unless a band is given.
    #[pyo3(signature = (band = None))]
    fn longest_chain(&self, band: Option<PyRef<'_, PySlopeBand>>) -> (usize, Vec<Pt>) {
        let r = longest_chain_lipschitz(&self.inner, band_or_classical(band));
        (r.length, r.path.iter().map(pt).collect())
    }

    #[pyo3(signature = (band = None))]
    fn optimal_support(&self, band: Option<PyRef<'_, PySlopeBand>>) -> Vec<Pt> {
        optimal_support_lipschitz(&self.inner, band_or_classical(band)).iter().map(pt).collect()
    }
}

#[pyclass(name = "Parallelogram", frozen)]
struct PyParallelogram {
    inner: geo::Parallelogram,
}

#[pymethods]
impl PyParallelogram {
    #[staticmethod]
    fn from_sides(c: f64, cprime: f64, mu: f64) -> PyResult<Self> {
        Ok(Self { inner: geo::Parallelogram::from_sides(c, cprime, mu).map_err(err)? })
    }

    #[staticmethod]
    fn from_corner(sigma: f64, rho: f64, mu: f64) -> PyResult<Self> {
        Ok(Self { inner: geo::Parallelogram::from_corner(sigma, rho, mu).map_err(err)? })
    }

    /// The window `[0, a] x [0, b]` seen in dominance coordinates.
    #[staticmethod]
    fn for_window(a: f64, b: f64, band: PyRef<'_, PySlopeBand>) -> PyResult<Self> {
        Ok(Self { inner: geo::problem_parallelogram(a, b, band.inner).map_err(err)? })
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    #[getter]
    fn cprime(&self) -> f64 {
        self.inner.cprime
    }

    fn area(&self) -> f64 {
        self.inner.area()
    }

    fn vertices(&self) -> Vec<Pt> {
        self.inner.vertices().iter().map(pt).collect()
    }

    /// `(area, (x0, x1, y0, y1), direction, max_shift)`.
    fn max_rectangle(&self) -> (f64, (f64, f64, f64, f64), Pt, f64) {
        let r = max_inscribed_rectangle(&self.inner);
        let w = r.witness;
        (r.area, (w.x0, w.x1, w.y0, w.y1), pt(&r.family.direction), r.family.max_shift)
    }
}

#[pyfunction]
fn child_seed(master: u64, index: u64) -> u64 {
    core_child_seed(master, index)
}

/// Runs an experiment and returns its report as JSON text.
#[pyfunction]
#[pyo3(signature = (kind, a, b, band, t, reps, seed = 0, extras = None))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    py: Python<'_>,
    kind: &str,
    a: f64,
    b: f64,
    band: PyRef<'_, PySlopeBand>,
    t: Vec<f64>,
    reps: usize,
    seed: u64,
    extras: Option<BTreeMap<String, f64>>,
) -> PyResult<String> {
    let mut spec = ExperimentSpec::new(a, b, band.inner, t, reps, seed);
    spec.extras = extras.unwrap_or_default();
    let run = match kind {
        "shape" => exp::run_shape,
        "fluct" => exp::run_fluctuation,
        "drift" => exp::run_noncentral_drift,
        "localize" => exp::run_localization,
        "wander" => exp::run_wandering,
        "gap" => exp::run_parallelogram_gap,
        other => return Err(PyValueError::new_err(format!("unknown experiment `{other}`"))),
    };
    let report = py.detach(|| run(&spec)).map_err(err)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// `(passes, fails)`.
#[pyfunction]
#[pyo3(signature = (trials = 500, points_max = 200, seed = 0))]
fn coupling_check(py: Python<'_>, trials: usize, points_max: usize, seed: u64) -> PyResult<(usize, usize)> {
    let out = py.detach(|| exp::run_coupling_check(trials, points_max, seed)).map_err(err)?;
    Ok((out.passes, out.fails))
}

/// `(retained, skipped_zero, violations)`.
#[pyfunction]
#[pyo3(signature = (configs = 500, seed = 0))]
fn crossing_check(py: Python<'_>, configs: usize, seed: u64) -> PyResult<(usize, usize, usize)> {
    let out = py.detach(|| exp::run_crossing(configs, seed)).map_err(err)?;
    Ok((out.retained, out.skipped_zero, out.violations))
}

#[pymodule]
fn hammerlip(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySlopeBand>()?;
    m.add_class::<PyPointCloud>()?;
    m.add_class::<PyParallelogram>()?;
    m.add_function(wrap_pyfunction!(child_seed, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(coupling_check, m)?)?;
    m.add_function(wrap_pyfunction!(crossing_check, m)?)?;
    Ok(())
}

use gaussys_core::analytic::{analytic_intensity, onedim_density};
use gaussys_core::classify::CLASSIFY_TOL;
use gaussys_core::verify::{estimate_queries, Design, McOptions, Query};
use gaussys_core::{
    canonicalize, classify_pair, equal_in_law_analytic, equal_in_law_mc, simulate_system, stationarity_test, Error,
    Interval, PairSpec, SimulationConfig, TimePoint, ValidationGrid,
};
use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Overflow { .. } => PyOverflowError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse<T: DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn dump<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("values serialize")
}

/// A time point: a float in one dimension or a list of coordinates.
#[derive(FromPyObject)]
enum TimeArg {
    Scalar(f64),
    Coords(Vec<f64>),
}

impl TimeArg {
    fn point(self) -> PyResult<TimePoint> {
        match self {
            TimeArg::Scalar(x) => TimePoint::new(vec![x]),
            TimeArg::Coords(v) => TimePoint::new(v),
        }
        .map_err(to_py)
    }
}

fn points(ts: Vec<TimeArg>) -> PyResult<Vec<TimePoint>> {
    ts.into_iter().map(TimeArg::point).collect()
}

fn intervals(bs: Vec<(f64, f64)>) -> PyResult<Vec<Interval>> {
    bs.into_iter().map(|(lo, hi)| Interval::new(lo, hi).map_err(to_py)).collect()
}

fn design_for(design: Option<&str>, dim: usize) -> PyResult<Design> {
    design.map_or_else(|| Ok(Design::default_for(dim)), parse)
}

/// Driving pair `(m, ξ)`, built from its JSON description.
#[pyclass(name = "Pair", module = "gaussys", frozen)]
struct Pair {
    inner: PairSpec,
}

#[pymethods]
impl Pair {
    #[new]
    fn new(json: &str) -> PyResult<Self> {
        Ok(Self { inner: parse(json)? })
    }

    fn to_json(&self) -> String {
        dump(&self.inner)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn mean_at(&self, t: TimeArg) -> PyResult<f64> {
        self.inner.mean_at(&t.point()?).map_err(to_py)
    }

    fn variance_at(&self, t: TimeArg) -> PyResult<f64> {
        self.inner.variance_at(&t.point()?).map_err(to_py)
    }

    /// Density of the one-time intensity measure at `x`.
    fn density(&self, t: TimeArg, x: f64) -> PyResult<f64> {
        onedim_density(&self.inner, &t.point()?, x).map_err(to_py)
    }

    /// Closed-form intensity of the box, or `None` when there is none.
    fn intensity(&self, times: Vec<TimeArg>, boxes: Vec<(f64, f64)>) -> PyResult<Option<f64>> {
        analytic_intensity(&self.inner, &points(times)?, &intervals(boxes)?).map_err(to_py)
    }

    /// Classification report as JSON.
    #[pyo3(signature = (tolerance=None))]
    fn classify(&self, tolerance: Option<f64>) -> PyResult<String> {
        let grid = ValidationGrid::default_for(self.inner.dim());
        classify_pair(&self.inner, &grid, tolerance.unwrap_or(CLASSIFY_TOL)).map(|r| dump(&r)).map_err(to_py)
    }

    #[pyo3(signature = (tolerance=None))]
    fn canonicalize(&self, tolerance: Option<f64>) -> PyResult<Pair> {
        let grid = ValidationGrid::default_for(self.inner.dim());
        let inner = canonicalize(&self.inner, &grid, tolerance.unwrap_or(CLASSIFY_TOL)).map_err(to_py)?;
        Ok(Pair { inner })
    }

    fn __repr__(&self) -> String {
        format!("Pair({})", self.to_json())
    }

    fn __eq__(&self, other: PyRef<'_, Pair>) -> bool {
        self.inner == other.inner
    }
}

/// Runs a simulation config and returns the samples as a JSON list.
#[pyfunction]
fn simulate(py: Python<'_>, config: &str) -> PyResult<String> {
    let config: SimulationConfig = parse(config)?;
    py.detach(|| simulate_system(config)?.collect::<gaussys_core::Result<Vec<_>>>())
        .map(|s| dump(&s))
        .map_err(to_py)
}

/// Monte Carlo estimate `(mean_count, std_error)` of a box intensity.
#[pyfunction]
#[pyo3(signature = (pair, times, boxes, replicates=20_000, seed=0))]
fn estimate(
    py: Python<'_>,
    pair: PyRef<'_, Pair>,
    times: Vec<TimeArg>,
    boxes: Vec<(f64, f64)>,
    replicates: u64,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let q = Query::new(points(times)?, intervals(boxes)?).map_err(to_py)?;
    let p = pair.inner.clone();
    let est = py.detach(|| estimate_queries(&p, &[q], replicates, 0, &McOptions::with_seed(seed))).map_err(to_py)?;
    Ok((est[0].mean_count, est[0].std_error))
}

/// Stationarity test report as JSON.
#[pyfunction]
#[pyo3(signature = (pair, design=None, replicates=20_000, alpha=0.05, seed=0))]
fn verify_stationarity(
    py: Python<'_>,
    pair: PyRef<'_, Pair>,
    design: Option<&str>,
    replicates: u64,
    alpha: f64,
    seed: u64,
) -> PyResult<String> {
    let d = design_for(design, pair.inner.dim())?;
    let p = pair.inner.clone();
    py.detach(|| stationarity_test(&p, &d, replicates, alpha, &McOptions::with_seed(seed)))
        .map(|r| dump(&r))
        .map_err(to_py)
}

/// Analytic equal-in-law decision as JSON.
#[pyfunction]
#[pyo3(signature = (a, b, tolerance=None))]
fn equal_in_law(a: PyRef<'_, Pair>, b: PyRef<'_, Pair>, tolerance: Option<f64>) -> PyResult<String> {
    let grid = ValidationGrid::default_for(a.inner.dim());
    equal_in_law_analytic(&a.inner, &b.inner, &grid, tolerance.unwrap_or(CLASSIFY_TOL)).map(|r| dump(&r)).map_err(to_py)
}

/// Monte Carlo equality test report as JSON.
#[pyfunction]
#[pyo3(signature = (a, b, design=None, replicates=20_000, alpha=0.05, seed=0))]
fn equal_in_law_test(
    py: Python<'_>,
    a: PyRef<'_, Pair>,
    b: PyRef<'_, Pair>,
    design: Option<&str>,
    replicates: u64,
    alpha: f64,
    seed: u64,
) -> PyResult<String> {
    let d = design_for(design, a.inner.dim())?;
    let (pa, pb) = (a.inner.clone(), b.inner.clone());
    py.detach(|| equal_in_law_mc(&pa, &pb, &d, replicates, alpha, &McOptions::with_seed(seed)))
        .map(|r| dump(&r))
        .map_err(to_py)
}

#[pymodule]
fn gaussys(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Pair>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_stationarity, m)?)?;
    m.add_function(wrap_pyfunction!(equal_in_law, m)?)?;
    m.add_function(wrap_pyfunction!(equal_in_law_test, m)?)?;
    Ok(())
}

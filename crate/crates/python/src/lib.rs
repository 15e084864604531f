//! Python bindings: `import qubitbath`.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use qubitbath::entanglement::{self, ConcurrenceSeries, PairClass, TwoQubitDensityMatrix};
use qubitbath::runner::{self, OutputFormat, RunConfig};
use qubitbath::{model, zeno, Error, InitialKind};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn pair_class(name: &str) -> PyResult<PairClass> {
    name.parse().map_err(py_err)
}

#[pyclass(name = "ModelParams", module = "qubitbath", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyModelParams(model::ModelParams);

#[pymethods]
impl PyModelParams {
    #[new]
    fn new(n: usize, ratio: f64) -> PyResult<Self> {
        model::ModelParams::new(n, ratio).map(Self).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn ratio(&self) -> f64 {
        self.0.ratio()
    }

    /// "weak", "critical" or "strong".
    #[getter]
    fn regime(&self) -> &'static str {
        match self.0.regime() {
            model::Regime::Weak => "weak",
            model::Regime::Critical => "critical",
            model::Regime::Strong => "strong",
        }
    }

    #[getter]
    fn omega(&self) -> Complex64 {
        self.0.omega().value()
    }

    fn survival_amplitude(&self, tau: f64) -> Complex64 {
        model::survival_amplitude(&self.0, tau)
    }

    fn survival_probability(&self, tau: f64) -> f64 {
        model::survival_probability(&self.0, tau)
    }

    fn zero_crossings(&self, m_max: usize) -> PyResult<Vec<f64>> {
        model::zero_crossings(&self.0, m_max).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("ModelParams(n={}, ratio={})", self.0.n(), self.0.ratio())
    }
}

#[pyclass(name = "InitialSpec", module = "qubitbath", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyInitialSpec(qubitbath::InitialSpec);

#[pymethods]
impl PyInitialSpec {
    #[staticmethod]
    fn w_state() -> Self {
        Self(qubitbath::InitialSpec::w_state())
    }

    #[staticmethod]
    #[pyo3(signature = (s, phi = 0.0))]
    fn two_qubit(s: f64, phi: f64) -> PyResult<Self> {
        qubitbath::InitialSpec::two_qubit(s, phi).map(Self).map_err(py_err)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.0.kind {
            InitialKind::WState => "w_state",
            InitialKind::TwoQubitSuperposition => "two_qubit_superposition",
        }
    }

    #[getter]
    fn s(&self) -> f64 {
        self.0.s
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.0.phi
    }

    fn __repr__(&self) -> String {
        match self.0.kind {
            InitialKind::WState => "InitialSpec.w_state()".into(),
            InitialKind::TwoQubitSuperposition => format!("InitialSpec.two_qubit(s={}, phi={})", self.0.s, self.0.phi),
        }
    }
}

/// Single-excitation amplitudes `(c1, c2, c3, E)` at `tau`.
#[pyfunction]
fn evolve_amplitudes(
    params: PyModelParams,
    spec: PyInitialSpec,
    tau: f64,
) -> PyResult<(Complex64, Complex64, Complex64, Complex64)> {
    let st = qubitbath::evolve_amplitudes(&params.0, &spec.0, tau).map_err(py_err)?;
    Ok((st.c1, st.c2, st.c3, st.e_amp))
}

#[pyfunction]
fn closed_form_concurrence(params: PyModelParams, spec: PyInitialSpec, pair: &str, tau: f64) -> PyResult<f64> {
    entanglement::closed_form_concurrence(&params.0, &spec.0, pair_class(pair)?, tau).map_err(py_err)
}

#[pyfunction]
fn stationary_concurrence(n: usize, spec: PyInitialSpec, pair: &str) -> PyResult<f64> {
    entanglement::stationary_concurrence(n, &spec.0, pair_class(pair)?).map_err(py_err)
}

/// Reduced two-qubit density matrix in the basis `|11>, |10>, |01>, |00>`.
#[pyfunction]
fn pair_density_matrix(params: PyModelParams, spec: PyInitialSpec, pair: &str, tau: f64) -> PyResult<Vec<Vec<Complex64>>> {
    let rho = entanglement::build_pair_rho(&params.0, &spec.0, pair_class(pair)?, tau).map_err(py_err)?;
    Ok(rho.entries().iter().map(|r| r.to_vec()).collect())
}

/// Wootters concurrence of a 4x4 density matrix given as nested lists.
#[pyfunction]
fn wootters_concurrence(rho: Vec<Vec<Complex64>>) -> PyResult<f64> {
    if rho.len() != 4 || rho.iter().any(|r| r.len() != 4) {
        return Err(PyValueError::new_err("density matrix must be 4x4"));
    }
    let mut entries = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (dst, src) in entries.iter_mut().zip(&rho) {
        dst.copy_from_slice(src);
    }
    let rho = TwoQubitDensityMatrix::new(entries).map_err(py_err)?;
    entanglement::wootters_concurrence(&rho).map_err(py_err)
}

/// `(taus, values)` on a uniform grid over `[0, tau_max]`.
#[pyfunction]
fn concurrence_series(
    params: PyModelParams,
    spec: PyInitialSpec,
    pair: &str,
    tau_max: f64,
    samples: usize,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let s = entanglement::concurrence_series(&params.0, &spec.0, pair_class(pair)?, tau_max, samples).map_err(py_err)?;
    Ok((s.taus, s.values))
}

/// Entanglement sudden death events as `(death, revival or None)`.
#[pyfunction]
#[pyo3(signature = (taus, values, pair = "kl"))]
fn detect_esd(taus: Vec<f64>, values: Vec<f64>, pair: &str) -> PyResult<Vec<(f64, Option<f64>)>> {
    let series = ConcurrenceSeries { pair: pair_class(pair)?, taus, values };
    let events = entanglement::detect_esd(&series).map_err(py_err)?;
    Ok(events.iter().map(|e| (e.death, e.revival)).collect())
}

/// Edges `(a, b, class, weight)` of the stationary correlation graph.
#[pyfunction]
fn steady_graph(n: usize, spec: PyInitialSpec) -> PyResult<Vec<(usize, usize, &'static str, f64)>> {
    let g = entanglement::steady_graph(n, &spec.0).map_err(py_err)?;
    Ok(g.edges.iter().map(|e| (e.a, e.b, e.class.name(), e.weight)).collect())
}

/// `Gamma_z(T)`; `inf` when `T` hits a node of the survival amplitude.
#[pyfunction]
fn effective_decay_rate(params: PyModelParams, interval: f64) -> PyResult<f64> {
    zeno::effective_decay_rate(&params.0, interval).map(|r| r.value()).map_err(py_err)
}

#[pyfunction]
fn zeno_survival(params: PyModelParams, interval: f64, count: usize) -> PyResult<f64> {
    let schedule = zeno::ZenoSchedule::new(interval, count).map_err(py_err)?;
    zeno::zeno_survival(&params.0, &schedule).map_err(py_err)
}

/// Runs a JSON run configuration and returns the rendered table.
#[pyfunction]
#[pyo3(signature = (config_json, format = "csv"))]
fn run(config_json: &str, format: &str) -> PyResult<String> {
    let format = match format {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => return Err(PyValueError::new_err(format!("unknown format '{other}'"))),
    };
    let cfg = RunConfig::from_json_str(config_json).map_err(py_err)?;
    let out = runner::run(&cfg).map_err(py_err)?;
    Ok(String::from_utf8(out.render(format)).expect("tables render as UTF-8"))
}

#[pymodule]
#[pyo3(name = "qubitbath")]
fn qubitbath_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyInitialSpec>()?;
    m.add_function(wrap_pyfunction!(evolve_amplitudes, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(pair_density_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(wootters_concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence_series, m)?)?;
    m.add_function(wrap_pyfunction!(detect_esd, m)?)?;
    m.add_function(wrap_pyfunction!(steady_graph, m)?)?;
    m.add_function(wrap_pyfunction!(effective_decay_rate, m)?)?;
    m.add_function(wrap_pyfunction!(zeno_survival, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}

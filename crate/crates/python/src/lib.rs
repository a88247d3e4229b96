//! Python bindings for the `causal-qram` library.

// pyo3 0.22 macro expansion trips this lint on every PyResult signature
#![allow(clippy::useless_conversion)]

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::{PyFileNotFoundError, PyValueError};
use pyo3::prelude::*;

use causal_qram::bounds;
use causal_qram::gates::{self, GateSet, GateTimes};
use causal_qram::lattice::{self, LatticeSpec, WeylFunction};
use causal_qram::params::{self, Conventions, LogBase, VelocitySource};
use causal_qram::qram::{self, ClassicalDatabase};
use causal_qram::verify::{run_verify, FaultInjection};
use causal_qram::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::ConfigNotFound(_) => PyFileNotFoundError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn conventions(
    log_base: &str,
    depth_exponent: u32,
    velocity_source: &str,
) -> PyResult<Conventions> {
    let base: LogBase = log_base.parse().map_err(py_err)?;
    let source: VelocitySource = velocity_source.parse().map_err(py_err)?;
    Ok(Conventions::new(base, depth_exponent, source))
}

#[pyclass(module = "causal_qram")]
#[derive(Clone)]
struct HardwareParams {
    inner: params::HardwareParams,
}

#[pymethods]
impl HardwareParams {
    #[new]
    #[pyo3(signature = (a=1e-6, delta_t=1e-3, g1=None, g2=None, lambda_=None, m=1.0, d=1, c_max=params::SPEED_OF_LIGHT))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        a: f64,
        delta_t: f64,
        g1: Option<f64>,
        g2: Option<f64>,
        lambda_: Option<Vec<f64>>,
        m: f64,
        d: usize,
        c_max: f64,
    ) -> PyResult<Self> {
        let defaults = params::HardwareParams::default();
        let lambda = lambda_.unwrap_or(defaults.lambda);
        let inner = params::HardwareParams {
            a,
            delta_t,
            g1: g1.unwrap_or(defaults.g1),
            g2: g2.unwrap_or(defaults.g2),
            nu: lambda.len(),
            lambda,
            m,
            d,
            c_max,
        }
        .validate()
        .map_err(py_err)?;
        Ok(HardwareParams { inner })
    }

    #[staticmethod]
    fn from_config(path: &str) -> PyResult<Self> {
        let inner = params::HardwareParams::from_config_file(path).map_err(py_err)?;
        Ok(HardwareParams { inner })
    }

    fn to_config(&self) -> String {
        self.inner.to_config_string()
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }
    #[getter]
    fn delta_t(&self) -> f64 {
        self.inner.delta_t
    }
    #[getter]
    fn g1(&self) -> f64 {
        self.inner.g1
    }
    #[getter]
    fn g2(&self) -> f64 {
        self.inner.g2
    }
    #[getter]
    fn lambda_(&self) -> Vec<f64> {
        self.inner.lambda.clone()
    }
    #[getter]
    fn m(&self) -> f64 {
        self.inner.m
    }
    #[getter]
    fn d(&self) -> usize {
        self.inner.d
    }
    #[getter]
    fn nu(&self) -> usize {
        self.inner.nu
    }
    #[getter]
    fn c_max(&self) -> f64 {
        self.inner.c_max
    }

    fn tau0(&self) -> f64 {
        self.inner.tau0()
    }

    fn density(&self) -> f64 {
        self.inner.density()
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "HardwareParams(a={}, delta_t={}, g1={}, g2={}, lambda_={:?}, m={}, d={}, c_max={})",
            p.a, p.delta_t, p.g1, p.g2, p.lambda, p.m, p.d, p.c_max
        )
    }
}

#[pyclass(module = "causal_qram", get_all)]
struct BoundResult {
    max_qubits_total: f64,
    max_linear_extent: f64,
    velocity_used: f64,
    time_scale: f64,
    ratio: f64,
    conventions: String,
}

impl From<bounds::BoundResult> for BoundResult {
    fn from(r: bounds::BoundResult) -> Self {
        BoundResult {
            max_qubits_total: r.max_qubits_total,
            max_linear_extent: r.max_linear_extent,
            velocity_used: r.velocity_used,
            time_scale: r.time_scale,
            ratio: r.ratio,
            conventions: r.conventions.to_string(),
        }
    }
}

#[pymethods]
impl BoundResult {
    fn __repr__(&self) -> String {
        format!(
            "BoundResult(max_qubits_total={:e}, max_linear_extent={:e}, velocity_used={}, conventions='{}')",
            self.max_qubits_total, self.max_linear_extent, self.velocity_used, self.conventions
        )
    }
}

#[pyfunction]
#[pyo3(signature = (params, log_base="natural", depth_exponent=2, velocity_source="lieb_robinson"))]
fn qram_max_qubits(
    params: &HardwareParams,
    log_base: &str,
    depth_exponent: u32,
    velocity_source: &str,
) -> PyResult<BoundResult> {
    let conv = conventions(log_base, depth_exponent, velocity_source)?;
    bounds::qram_max_qubits(&params.inner, conv)
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (params, log_base="natural", depth_exponent=2))]
fn teleport_hybrid_max_qubits(
    params: &HardwareParams,
    log_base: &str,
    depth_exponent: u32,
) -> PyResult<BoundResult> {
    let conv = conventions(log_base, depth_exponent, "teleport-hybrid")?;
    bounds::teleport_hybrid_max_qubits(&params.inner, conv)
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (a, delta_t, c=params::SPEED_OF_LIGHT, log_base="natural"))]
fn naive_max_qubits(a: f64, delta_t: f64, c: f64, log_base: &str) -> PyResult<f64> {
    let base: LogBase = log_base.parse().map_err(py_err)?;
    bounds::naive_max_qubits(a, delta_t, c, base).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (ratio, p, log_base="natural"))]
fn fixed_point_solve(ratio: f64, p: u32, log_base: &str) -> PyResult<f64> {
    let base: LogBase = log_base.parse().map_err(py_err)?;
    bounds::fixed_point_solve(ratio, p, base).map_err(py_err)
}

/// (lattice units/s, m/s)
#[pyfunction]
fn lr_velocity(params: &HardwareParams) -> PyResult<(f64, f64)> {
    let v = bounds::lr_velocity(&params.inner).map_err(py_err)?;
    Ok((v.lattice_units, v.physical))
}

#[pyfunction]
fn qft_velocity(params: &HardwareParams) -> PyResult<f64> {
    let lambda_d = bounds::coarse_grain(&params.inner).map_err(py_err)?;
    bounds::qft_velocity(lambda_d, params.inner.density()).map_err(py_err)
}

#[pyclass(module = "causal_qram", get_all)]
struct LightCone {
    /// (r, arrival time or None, peak)
    arrivals: Vec<(usize, Option<f64>, f64)>,
    velocity: f64,
    velocity_physical: f64,
    intercept: f64,
    group_velocity: f64,
    lr_bound: f64,
    within_bound: bool,
}

#[pyclass(module = "causal_qram")]
struct Lattice {
    spec: LatticeSpec,
}

fn weyl(f: BTreeMap<usize, Complex64>) -> WeylFunction {
    f.into_iter().collect()
}

#[pymethods]
impl Lattice {
    #[new]
    #[pyo3(signature = (d, l, lambda_, m=1.0, a=1.0))]
    fn new(d: usize, l: usize, lambda_: Vec<f64>, m: f64, a: f64) -> PyResult<Self> {
        let spec = LatticeSpec::new(d, l, lambda_, m, a).map_err(py_err)?;
        Ok(Lattice { spec })
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.spec.n_sites()
    }

    fn dispersion(&self, k: Vec<f64>) -> PyResult<f64> {
        if k.len() != self.spec.d {
            return Err(py_err(Error::DimensionMismatch {
                expected: self.spec.d,
                got: k.len(),
            }));
        }
        Ok(lattice::dispersion(&self.spec, &k))
    }

    /// Maximum group velocity in lattice units/s.
    fn max_group_velocity(&self) -> f64 {
        lattice::max_group_velocity(&self.spec).lattice_units
    }

    fn omega_max(&self) -> f64 {
        lattice::NormalModes::new(&self.spec).omega_max()
    }

    /// ‖[τ_t(W(f)), W(g)]‖ with f, g given as {site: complex amplitude}.
    fn weyl_commutator_norm(
        &self,
        f: BTreeMap<usize, Complex64>,
        g: BTreeMap<usize, Complex64>,
        t: f64,
    ) -> PyResult<f64> {
        lattice::weyl_commutator_norm(&self.spec, &weyl(f), &weyl(g), t).map_err(py_err)
    }

    /// Full symplectic propagator S(t) as a 2n × 2n nested list.
    fn propagator(&self, t: f64) -> PyResult<Vec<Vec<f64>>> {
        let s = lattice::propagate(&self.spec, t).map_err(py_err)?;
        let dense = s.to_dense();
        Ok(dense
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect())
    }

    #[pyo3(signature = (threshold=1e-3, t_max=None, r_max=None))]
    fn light_cone(
        &self,
        py: Python<'_>,
        threshold: f64,
        t_max: Option<f64>,
        r_max: Option<usize>,
    ) -> PyResult<LightCone> {
        let spec = &self.spec;
        let cone = py
            .allow_threads(|| {
                let r_max = r_max.unwrap_or_else(|| spec.max_clean_distance());
                let t_max = t_max.unwrap_or_else(|| {
                    let v = lattice::max_group_velocity(spec).lattice_units;
                    1.25 * r_max as f64 / v + 20.0 / lattice::NormalModes::new(spec).omega_max()
                });
                lattice::measure_light_cone(spec, threshold, t_max, r_max)
            })
            .map_err(py_err)?;
        Ok(LightCone {
            arrivals: cone
                .arrivals
                .iter()
                .map(|a| (a.r, a.t_arrival, a.peak))
                .collect(),
            velocity: cone.velocity_lattice,
            velocity_physical: cone.velocity_physical,
            intercept: cone.intercept,
            group_velocity: cone.group_velocity.lattice_units,
            lr_bound: cone.lr_bound_lattice,
            within_bound: cone.within_bound(),
        })
    }
}

fn rows(u: &gates::Unitary) -> Vec<Vec<Complex64>> {
    u.matrix()
        .row_iter()
        .map(|r| r.iter().copied().collect())
        .collect()
}

/// exp(−i t g₁ (a†b + ab†)) on two qubit modes, basis |n_a n_b⟩.
#[pyfunction]
fn bs_unitary(g1: f64, t: f64) -> PyResult<Vec<Vec<Complex64>>> {
    gates::bs_unitary(g1, t, (2, 2))
        .map(|u| rows(&u))
        .map_err(py_err)
}

#[pyfunction]
fn cz_unitary(g2: f64, t: f64) -> PyResult<Vec<Vec<Complex64>>> {
    gates::cz_unitary(g2, t, (2, 2))
        .map(|u| rows(&u))
        .map_err(py_err)
}

#[pyfunction]
fn cswap_unitary(g1: f64, g2: f64) -> PyResult<Vec<Vec<Complex64>>> {
    gates::cswap_composite(g1, g2, [2, 2, 2])
        .map(|u| rows(&u))
        .map_err(py_err)
}

/// Fidelity of the BS·CZ·BS composite to Fredkin up to diagonal phases.
#[pyfunction]
fn cswap_fidelity(g1: f64, g2: f64) -> PyResult<f64> {
    let u = gates::cswap_composite(g1, g2, [2, 2, 2]).map_err(py_err)?;
    gates::gauge_equivalent(u.matrix(), gates::fredkin().matrix())
        .map(|c| c.fidelity)
        .map_err(py_err)
}

/// (t_sw, t_bs, t_cz, t_cswap, tau0)
#[pyfunction]
fn gate_times(g1: f64, g2: f64) -> PyResult<(f64, f64, f64, f64, f64)> {
    let t = GateTimes::new(g1, g2).map_err(py_err)?;
    Ok((t.t_sw(), t.t_bs(), t.t_cz(), t.t_cswap(), t.tau0()))
}

/// Wall time of initialization plus one query on a depth-n tree.
#[pyfunction]
fn query_time(n: usize, g1: f64, g2: f64) -> PyResult<f64> {
    let init = qram::schedule_initialization(n).map_err(py_err)?;
    let query = qram::schedule_query(n).map_err(py_err)?;
    qram::total_time(&init, &query, g1, g2).map_err(py_err)
}

#[pyclass(module = "causal_qram", get_all)]
struct QueryResult {
    fidelity: f64,
    pre_uncompute_fidelity: f64,
    ancilla_restored: f64,
    norm: f64,
    /// (address, expected, read, fidelity)
    retrieval: Vec<(usize, bool, bool, f64)>,
}

#[pyfunction]
#[pyo3(signature = (bits, amplitudes, g1=2000.0 * std::f64::consts::PI, g2=2000.0 * std::f64::consts::PI))]
fn simulate_query(
    py: Python<'_>,
    bits: &str,
    amplitudes: Vec<Complex64>,
    g1: f64,
    g2: f64,
) -> PyResult<QueryResult> {
    let db = ClassicalDatabase::from_bitstring(bits).map_err(py_err)?;
    let r = py
        .allow_threads(|| qram::simulate_query(&db, &amplitudes, g1, g2))
        .map_err(py_err)?;
    Ok(QueryResult {
        fidelity: r.fidelity,
        pre_uncompute_fidelity: r.pre_uncompute_fidelity,
        ancilla_restored: r.ancilla_restored,
        norm: r.norm,
        retrieval: r
            .retrieval
            .iter()
            .map(|row| (row.address, row.expected, row.read, row.fidelity))
            .collect(),
    })
}

/// (min fidelity, mismatched addresses) over every basis address and 10
/// seeded superpositions.
#[pyfunction]
#[pyo3(signature = (bits, seed=7, g1=2000.0 * std::f64::consts::PI, g2=2000.0 * std::f64::consts::PI))]
fn verify_retrieval(
    py: Python<'_>,
    bits: &str,
    seed: u64,
    g1: f64,
    g2: f64,
) -> PyResult<(f64, Vec<usize>)> {
    let db = ClassicalDatabase::from_bitstring(bits).map_err(py_err)?;
    let gates = GateSet::new(g1, g2).map_err(py_err)?;
    let report = py
        .allow_threads(|| qram::verify_retrieval(&db, &gates, seed))
        .map_err(py_err)?;
    Ok((report.min_fidelity, report.mismatches))
}

#[pyfunction]
fn classical_trace(bits: &str, x: usize) -> PyResult<bool> {
    let db = ClassicalDatabase::from_bitstring(bits).map_err(py_err)?;
    if x >= db.len() {
        return Err(PyValueError::new_err(format!(
            "address {x} out of range for {} leaves",
            db.len()
        )));
    }
    Ok(qram::classical_trace(&db, x))
}

/// Runs every self-check suite; returns {suite: (passed, message)}.
#[pyfunction]
fn verify(py: Python<'_>) -> BTreeMap<&'static str, (bool, String)> {
    let report = py.allow_threads(|| run_verify(FaultInjection::default()));
    report
        .suites
        .into_iter()
        .map(|s| (s.name, (s.passed, s.message)))
        .collect()
}

#[pymodule]
#[pyo3(name = "causal_qram")]
fn causal_qram_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<HardwareParams>()?;
    m.add_class::<BoundResult>()?;
    m.add_class::<Lattice>()?;
    m.add_class::<LightCone>()?;
    m.add_class::<QueryResult>()?;
    m.add_function(wrap_pyfunction!(qram_max_qubits, m)?)?;
    m.add_function(wrap_pyfunction!(teleport_hybrid_max_qubits, m)?)?;
    m.add_function(wrap_pyfunction!(naive_max_qubits, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_point_solve, m)?)?;
    m.add_function(wrap_pyfunction!(lr_velocity, m)?)?;
    m.add_function(wrap_pyfunction!(qft_velocity, m)?)?;
    m.add_function(wrap_pyfunction!(bs_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(cz_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(cswap_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(cswap_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(gate_times, m)?)?;
    m.add_function(wrap_pyfunction!(query_time, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_query, m)?)?;
    m.add_function(wrap_pyfunction!(verify_retrieval, m)?)?;
    m.add_function(wrap_pyfunction!(classical_trace, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

//! Python bindings for `fusionlab`.
//!
//! Momenta are passed as strings (`"1/2"`), complex numbers as Python
//! `complex`. Reports come back as objects with a few attributes and a
//! `to_json()` method carrying everything else.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use fusionlab::heisenberg::{self as heis, Chain};
use fusionlab::logseries::LogPowerSeries;
use fusionlab::pipeline::{self, PipelineConfig};
use fusionlab::rewriter::{fock_modules, Normalization, Reducer};
use fusionlab::scalar::{parse_q, Q};
use fusionlab::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Parse(_) | Error::Invalid(_) | Error::Region(_) | Error::BranchCut(_) | Error::VariableMismatch(..) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn momenta<const N: usize>(m: [String; N]) -> PyResult<[Q; N]> {
    let mut out = Vec::with_capacity(N);
    for s in &m {
        out.push(parse_q(s).map_err(py_err)?);
    }
    Ok(out.try_into().expect("length checked by the array type"))
}

fn json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string_pretty(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Truncated series `Σ c z^{d+m} log^t z` with complex coefficients.
#[pyclass(name = "LogSeries", module = "fusionlab", from_py_object)]
#[derive(Clone)]
struct PyLogSeries {
    inner: LogPowerSeries<Complex64>,
}

#[pymethods]
impl PyLogSeries {
    #[new]
    #[pyo3(signature = (var = "z", m_max = 24, k_max = 8))]
    fn new(var: &str, m_max: u32, k_max: u32) -> Self {
        Self { inner: LogPowerSeries::zero(var, m_max, k_max) }
    }

    #[staticmethod]
    #[pyo3(signature = (exponent, logpow = 0, coeff = Complex64::new(1.0, 0.0), var = "z", m_max = 24, k_max = 8))]
    fn monomial(exponent: Complex64, logpow: u32, coeff: Complex64, var: &str, m_max: u32, k_max: u32) -> Self {
        Self { inner: LogPowerSeries::monomial(var, exponent, logpow, coeff, m_max, k_max) }
    }

    /// `Σ coeffs[m] z^m`.
    #[staticmethod]
    #[pyo3(signature = (coeffs, var = "z", m_max = None, k_max = 8))]
    fn power_series(coeffs: Vec<Complex64>, var: &str, m_max: Option<u32>, k_max: u32) -> Self {
        let m = m_max.unwrap_or(coeffs.len().saturating_sub(1) as u32);
        Self { inner: LogPowerSeries::power_series(var, &coeffs, m, k_max) }
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Self { inner: LogPowerSeries::from_json_str(s).map_err(py_err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    /// Triples `(exponent, logpow, coefficient)`.
    fn terms(&self) -> Vec<(Complex64, u32, Complex64)> {
        self.inner.terms().map(|(e, t, c)| (e, t, *c)).collect()
    }

    fn coeff(&self, exponent: Complex64, logpow: u32) -> Complex64 {
        self.inner.coeff(&exponent, logpow)
    }

    #[getter]
    fn truncated(&self) -> bool {
        self.inner.truncated()
    }

    fn derive(&self) -> Self {
        Self { inner: self.inner.derive() }
    }

    /// Principal-branch value and tail estimate.
    fn eval(&self, z: Complex64) -> PyResult<(Complex64, f64)> {
        self.inner.eval(z).map_err(py_err)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.add(&other.inner).map_err(py_err)? })
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.sub(&other.inner).map_err(py_err)? })
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.mul(&other.inner).map_err(py_err)? })
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("LogSeries(var={:?}, terms={})", self.inner.var(), self.inner.len())
    }
}

/// Free-boson Fock module of a rational momentum.
#[pyclass(name = "FockModule", module = "fusionlab")]
struct PyFockModule {
    inner: heis::FockModule,
}

#[pymethods]
impl PyFockModule {
    #[new]
    #[pyo3(signature = (momentum, grade_cutoff = 12))]
    fn new(momentum: &str, grade_cutoff: u32) -> PyResult<Self> {
        Ok(Self { inner: heis::FockModule::new(parse_q(momentum).map_err(py_err)?, grade_cutoff) })
    }

    fn dim(&self, grade: u32) -> usize {
        self.inner.dim(grade)
    }

    fn basis(&self, grade: u32) -> Vec<Vec<u32>> {
        self.inner.basis(grade).to_vec()
    }

    /// Conformal weight of a basis vector, as `"p/q"`.
    #[pyo3(signature = (partition = Vec::new()))]
    fn weight(&self, partition: Vec<u32>) -> String {
        self.inner.weight(&partition).to_string()
    }

    fn __repr__(&self) -> String {
        format!("FockModule(momentum={}, grade_cutoff={})", self.inner.momentum(), self.inner.cutoff())
    }
}

/// `x^{ac} y^{bc} (x-y)^{ab}`.
#[pyfunction]
fn closed_form_4pt(momenta_abc: [String; 3], x: Complex64, y: Complex64) -> PyResult<Complex64> {
    let [a, b, c] = momenta(momenta_abc)?;
    heis::closed_form_4pt(&a, &b, &c, x, y).map_err(py_err)
}

#[pyfunction]
fn closed_form_5pt(momenta_abcd: [String; 4], x: Complex64, y: Complex64, z: Complex64) -> PyResult<Complex64> {
    let [a, b, c, d] = momenta(momenta_abcd)?;
    heis::closed_form_5pt([&a, &b, &c, &d], x, y, z).map_err(py_err)
}

fn parse_chain(s: &str) -> PyResult<Chain> {
    match s {
        "a" | "A" => Ok(Chain::A),
        "b" | "B" => Ok(Chain::B),
        _ => Err(PyValueError::new_err(format!("unknown chain {s:?}, expected 'a' or 'b'"))),
    }
}

/// Truncated double mode sum `⟨θ, 𝒴(v,x) 𝒴(u,y) w⟩` (chain a) or
/// `⟨θ, 𝒴(𝒴(v,x-y) u, y) w⟩` (chain b). Returns `(value, tail)`.
#[pyfunction]
#[pyo3(signature = (momenta_abc, x, y, theta = Vec::new(), v = Vec::new(), u = Vec::new(), w = Vec::new(), g_max = 12, chain = "a"))]
#[allow(clippy::too_many_arguments)]
fn mode_sum(
    momenta_abc: [String; 3],
    x: Complex64,
    y: Complex64,
    theta: Vec<u32>,
    v: Vec<u32>,
    u: Vec<u32>,
    w: Vec<u32>,
    g_max: u32,
    chain: &str,
) -> PyResult<(Complex64, f64)> {
    let [a, b, c] = momenta(momenta_abc)?;
    let fp = heis::FourPoint::new(a, b, c);
    let s = fp.direct_mode_sum(parse_chain(chain)?, (&theta, &v, &u, &w), x, y, g_max).map_err(py_err)?;
    Ok((s.value, s.tail))
}

/// A correlator rewritten over basis quadruples `(ν*, |a⟩, |b⟩, |c⟩)`.
#[pyclass(name = "Reduction", module = "fusionlab")]
struct PyReduction {
    momenta: [Q; 3],
    terms: Vec<(Vec<u32>, fusionlab::rewriter::Coefficient)>,
    steps: usize,
}

#[pymethods]
impl PyReduction {
    /// Pairs `(ν, coefficient)` with the coefficient printed as a Laurent
    /// polynomial in `x`, `y`, `x - y`.
    fn terms(&self) -> Vec<(Vec<u32>, String)> {
        self.terms.iter().map(|(nu, c)| (nu.clone(), c.to_string())).collect()
    }

    #[getter]
    fn steps(&self) -> usize {
        self.steps
    }

    /// Value at `(x, y)`, with the basis correlators in closed form.
    fn eval(&self, x: Complex64, y: Complex64) -> PyResult<Complex64> {
        let [a, b, c] = &self.momenta;
        let mut total = Complex64::new(0.0, 0.0);
        for (nu, coef) in &self.terms {
            total += coef.eval(x, y) * heis::basis_correlator(a, b, c, nu, x, y).map_err(py_err)?;
        }
        Ok(total)
    }

    fn __len__(&self) -> usize {
        self.terms.len()
    }
}

/// Reduce `F(θ, v, u, w)` to basis quadruples.
#[pyfunction]
#[pyo3(signature = (momenta_abc, theta = Vec::new(), v = Vec::new(), u = Vec::new(), w = Vec::new(), normalization = "f", chain = "a", grade_cutoff = 12, n = 4))]
#[allow(clippy::too_many_arguments)]
fn reduce(
    momenta_abc: [String; 3],
    theta: Vec<u32>,
    v: Vec<u32>,
    u: Vec<u32>,
    w: Vec<u32>,
    normalization: &str,
    chain: &str,
    grade_cutoff: u32,
    n: u32,
) -> PyResult<PyReduction> {
    let m = momenta(momenta_abc)?;
    let red = Reducer::new(fock_modules(&m, grade_cutoff), n);
    let q = red.quadruple(theta, v, u, w);
    let norm = Normalization::parse(normalization).map_err(py_err)?;
    let r = red.reduce_to_basis(&q, norm, parse_chain(chain)?).map_err(py_err)?;
    let terms = r.combination.terms.into_iter().map(|((b, _, _), c)| (b.theta, c)).collect();
    Ok(PyReduction { momenta: m, terms, steps: r.trace.len() })
}

#[pyclass(name = "AssociativityReport", module = "fusionlab")]
struct PyAssociativityReport {
    inner: pipeline::AssociativityReport,
}

#[pymethods]
impl PyAssociativityReport {
    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed
    }

    #[getter]
    fn max_deviation(&self) -> f64 {
        self.inner.max_deviation
    }

    #[getter]
    fn max_closed_form_deviation(&self) -> f64 {
        self.inner.max_closed_form_deviation
    }

    /// `(x, y, A(BC) value, (AB)C value, closed form)` per point.
    fn values(&self) -> Vec<(Complex64, Complex64, Complex64, Complex64, Complex64)> {
        self.inner.points.iter().map(|p| (p.x, p.y, p.a_bc, p.ab_c, p.closed_form)).collect()
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "AssociativityReport(points={}, max_deviation={:e}, passed={})",
            self.inner.points.len(),
            self.inner.max_deviation,
            self.inner.passed
        )
    }
}

/// Compare both bracketings of the four-point function at each point.
/// Without `points`, samples `count` points around `(7, 4)`.
#[pyfunction]
#[pyo3(signature = (momenta_abc = None, points = None, count = 20, seed = 7, g_max = 12, order = 24, tol = 1e-6))]
#[allow(clippy::too_many_arguments)]
fn check_associativity(
    py: Python<'_>,
    momenta_abc: Option<[String; 3]>,
    points: Option<Vec<(Complex64, Complex64)>>,
    count: usize,
    seed: u64,
    g_max: u32,
    order: usize,
    tol: f64,
) -> PyResult<PyAssociativityReport> {
    let m = momenta(momenta_abc.unwrap_or_else(|| ["1".into(), "1".into(), "1".into()]))?;
    let pts = points.unwrap_or_else(|| {
        pipeline::sample_points(seed, count, (Complex64::new(7.0, 0.0), Complex64::new(4.0, 0.0)), 0.5)
    });
    let config = PipelineConfig { g_max, order, tol, ..Default::default() };
    config.validate().map_err(py_err)?;
    let inner = py.detach(|| pipeline::check_associativity(&m, &pts, &config)).map_err(py_err)?;
    Ok(PyAssociativityReport { inner })
}

#[pyclass(name = "PentagonReport", module = "fusionlab")]
struct PyPentagonReport {
    inner: pipeline::PentagonReport,
}

#[pymethods]
impl PyPentagonReport {
    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed
    }

    #[getter]
    fn oracle(&self) -> Complex64 {
        self.inner.oracle
    }

    #[getter]
    fn max_pairwise_deviation(&self) -> f64 {
        self.inner.max_pairwise_deviation
    }

    /// Bracketing name and value, e.g. `("A(B(CD))", 1008+0j)`.
    fn values(&self) -> Vec<(String, Complex64)> {
        self.inner.values.iter().map(|v| (v.bracketing.name().to_string(), v.value)).collect()
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "PentagonReport(oracle={}, max_pairwise_deviation={:e}, passed={})",
            self.inner.oracle, self.inner.max_pairwise_deviation, self.inner.passed
        )
    }
}

#[pyfunction]
#[pyo3(signature = (momenta_abcd = None, point = (Complex64::new(7.0, 0.0), Complex64::new(6.0, 0.0), Complex64::new(4.0, 0.0)), max_grade = 8, tol = 1e-5))]
fn check_pentagon(
    py: Python<'_>,
    momenta_abcd: Option<[String; 4]>,
    point: (Complex64, Complex64, Complex64),
    max_grade: u32,
    tol: f64,
) -> PyResult<PyPentagonReport> {
    let m = momenta(momenta_abcd.unwrap_or_else(|| ["1".into(), "1".into(), "1".into(), "1".into()]))?;
    let inner = py.detach(|| pipeline::check_pentagon(&m, point, max_grade, tol)).map_err(py_err)?;
    Ok(PyPentagonReport { inner })
}

#[pymodule]
fn fusionlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLogSeries>()?;
    m.add_class::<PyFockModule>()?;
    m.add_class::<PyReduction>()?;
    m.add_class::<PyAssociativityReport>()?;
    m.add_class::<PyPentagonReport>()?;
    m.add_function(wrap_pyfunction!(closed_form_4pt, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_5pt, m)?)?;
    m.add_function(wrap_pyfunction!(mode_sum, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(check_associativity, m)?)?;
    m.add_function(wrap_pyfunction!(check_pentagon, m)?)?;
    Ok(())
}

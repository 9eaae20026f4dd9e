//! Python module `ipr_lab`. Rationals cross the boundary as `"p/q"`
//! strings; certificates, colorings and reports as JSON text.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ipr_core::coloring::{dyadic_three_color as three_color, Coloring, Domain};
use ipr_core::construct;
use ipr_core::matrix::{build_family, classify_matrix, compress, diagonal_sum, SparseMatrix};
use ipr_core::mt::TermSequence;
use ipr_core::numeric::{phi_even_zero_blocks, Dyadic, Rational};
use ipr_core::search::{self, BoundOutcome, Outcome, SearchBounds, SearchError, SearchOptions};

create_exception!(ipr_lab, BudgetExhausted, PyRuntimeError);

fn invalid(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn search_err(e: SearchError) -> PyErr {
    match e {
        SearchError::BudgetExhausted { .. } => BudgetExhausted::new_err(e.to_string()),
        other => invalid(other),
    }
}

fn rational(s: &str) -> PyResult<Rational> {
    s.parse().map_err(invalid)
}

fn rationals(v: &[String]) -> PyResult<Vec<Rational>> {
    v.iter().map(|s| rational(s)).collect()
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(Rational::to_string).collect()
}

fn options(workers: usize, budget: Option<u64>) -> SearchOptions {
    let opts = SearchOptions::default().with_workers(workers.max(1));
    match budget {
        Some(b) => opts.with_budget(b),
        None => opts,
    }
}

#[pyclass(name = "Matrix", module = "ipr_lab", frozen)]
pub struct PyMatrix(SparseMatrix);

#[pymethods]
impl PyMatrix {
    #[staticmethod]
    #[pyo3(signature = (name, size, params=Vec::new()))]
    fn family(name: &str, size: usize, params: Vec<String>) -> PyResult<Self> {
        Ok(PyMatrix(build_family(name, size, &rationals(&params)?).map_err(invalid)?))
    }

    #[staticmethod]
    fn from_rows(rows: Vec<Vec<String>>) -> PyResult<Self> {
        let dense: Vec<Vec<Rational>> = rows.iter().map(|r| rationals(r)).collect::<PyResult<_>>()?;
        Ok(PyMatrix(SparseMatrix::from_dense(&dense).map_err(invalid)?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyMatrix(serde_json::from_str(text).map_err(invalid)?))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("matrices serialize")
    }

    #[getter]
    fn nrows(&self) -> usize {
        self.0.nrows()
    }

    #[getter]
    fn ncols(&self) -> usize {
        self.0.ncols()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.0.to_dense().iter().map(|r| strings(r)).collect()
    }

    fn apply(&self, x: Vec<String>) -> PyResult<Vec<String>> {
        Ok(strings(&self.0.apply(&rationals(&x)?).map_err(invalid)?))
    }

    fn diagonal_sum(&self, other: &PyMatrix) -> PyMatrix {
        PyMatrix(diagonal_sum(&self.0, &other.0))
    }

    /// Structural report as JSON.
    #[pyo3(signature = (breakpoints=None))]
    fn classify(&self, breakpoints: Option<Vec<usize>>) -> PyResult<String> {
        let report = classify_matrix(&self.0, breakpoints.as_deref()).map_err(invalid)?;
        Ok(serde_json::to_string(&report).expect("reports serialize"))
    }

    fn __repr__(&self) -> String {
        format!(
            "Matrix({}x{}, family={:?})",
            self.0.nrows(),
            self.0.ncols(),
            self.0.family().unwrap_or("-")
        )
    }
}

#[pyclass(name = "Coloring", module = "ipr_lab", frozen)]
pub struct PyColoring(Coloring);

#[pymethods]
impl PyColoring {
    /// Table coloring of the integers `lo..=hi`.
    #[staticmethod]
    fn integers(lo: i64, hi: i64, r: usize, colors: Vec<usize>) -> PyResult<Self> {
        let domain = Domain::integers(lo, hi).map_err(invalid)?;
        if colors.len() != domain.len() {
            return Err(invalid(format!("{} colors for {} points", colors.len(), domain.len())));
        }
        let c = Coloring::table_from_colors(domain, r, &colors);
        let report = c.validate();
        if !report.valid {
            return Err(invalid(report.violations.join("; ")));
        }
        Ok(PyColoring(c))
    }

    /// `phi mod r` on the dyadics with support inside `[low, high]`.
    #[staticmethod]
    fn dyadic_phi(low: i64, high: i64, r: usize) -> PyResult<Self> {
        Ok(PyColoring(Coloring::dyadic_phi(Domain::dyadic_window(low, high).map_err(invalid)?, r)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyColoring(serde_json::from_str(text).map_err(invalid)?))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("colorings serialize")
    }

    #[getter]
    fn r(&self) -> usize {
        self.0.r()
    }

    fn color_of(&self, x: &str) -> PyResult<usize> {
        self.0.color_of(&rational(x)?).map_err(invalid)
    }

    fn points(&self) -> Vec<String> {
        strings(self.0.domain().points())
    }
}

#[pyclass(name = "Certificate", module = "ipr_lab", frozen)]
pub struct PyCertificate(search::Certificate);

#[pymethods]
impl PyCertificate {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyCertificate(search::Certificate::from_json(text).map_err(invalid)?))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn kind(&self) -> String {
        serde_json::to_value(self.0.kind)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default()
    }

    /// `(x, image)` for witness certificates.
    fn witness(&self) -> Option<(Vec<String>, Vec<String>)> {
        self.0.witness().map(|(x, y)| (strings(x), strings(y)))
    }

    /// Independent re-check; returns the list of violations (empty when valid).
    fn verify(&self) -> PyResult<Vec<String>> {
        Ok(search::verify_certificate(&self.0).map_err(search_err)?.violations)
    }
}

#[pyfunction]
fn dyadic_phi(x: &str) -> PyResult<u64> {
    phi_even_zero_blocks(&rational(x)?).map_err(invalid)
}

#[pyfunction]
fn dyadic_three_color(x: &str) -> PyResult<usize> {
    let d = Dyadic::from_rational(&rational(x)?).map_err(invalid)?;
    three_color(&d).map_err(invalid)
}

#[pyfunction]
fn dyadic_support(x: &str) -> PyResult<Vec<i64>> {
    Ok(Dyadic::from_rational(&rational(x)?).map_err(invalid)?.support().to_vec())
}

/// Milliken–Taylor values with their multiplicities, ascending.
#[pyfunction]
fn mt_enumerate(tuple: Vec<String>, terms: Vec<String>) -> PyResult<Vec<(String, u64)>> {
    let a = compress(&rationals(&tuple)?).map_err(invalid)?;
    let x = TermSequence::new(rationals(&terms)?).map_err(invalid)?;
    let set = ipr_core::mt::mt_enumerate(&a, &x).map_err(invalid)?;
    Ok(set.values.iter().map(Rational::to_string).zip(set.multiplicities).collect())
}

/// Lexicographically least witness with every column ranging over `grid`
/// (the coloring's domain when omitted).
#[pyfunction]
#[pyo3(signature = (matrix, coloring, grid=None, epsilon=None, workers=1, budget=None))]
fn find_witness(
    matrix: &PyMatrix,
    coloring: &PyColoring,
    grid: Option<Vec<String>>,
    epsilon: Option<String>,
    workers: usize,
    budget: Option<u64>,
) -> PyResult<Option<PyCertificate>> {
    let grid = match grid {
        Some(g) => rationals(&g)?,
        None => coloring.0.domain().points().to_vec(),
    };
    let opts = options(workers, budget);
    let bounds = SearchBounds::uniform(grid, matrix.0.ncols())
        .with_budget(opts.budget)
        .with_epsilon(epsilon.as_deref().map(rational).transpose()?);
    let out = search::find_witness(&matrix.0, &coloring.0, &bounds, &opts).map_err(search_err)?;
    Ok(out.found().map(PyCertificate))
}

/// Avoiding `r`-coloring of the integers `1..=n`, as a refutation certificate.
#[pyfunction]
#[pyo3(signature = (matrix, r, n, workers=1, budget=None))]
fn find_avoiding_coloring(
    matrix: &PyMatrix,
    r: usize,
    n: i64,
    workers: usize,
    budget: Option<u64>,
) -> PyResult<Option<PyCertificate>> {
    let domain = Domain::integers(1, n).map_err(invalid)?;
    let out = search::find_avoiding_coloring(&matrix.0, r, &domain, &options(workers, budget)).map_err(search_err)?;
    Ok(match out {
        Outcome::Found(c) => Some(PyCertificate(c)),
        Outcome::Exhausted { .. } => None,
    })
}

/// `(N, certificate)`, or `None` when every `N <= max_n` is avoidable.
#[pyfunction]
#[pyo3(signature = (matrix, r, max_n, workers=1, budget=None))]
fn compactness_bound(
    matrix: &PyMatrix,
    r: usize,
    max_n: usize,
    workers: usize,
    budget: Option<u64>,
) -> PyResult<Option<(usize, PyCertificate)>> {
    match search::compactness_bound(&matrix.0, r, max_n, &options(workers, budget)).map_err(search_err)? {
        BoundOutcome::Resolved(c) => {
            let n = match &c.payload {
                search::Payload::Bound { n, .. } => *n,
                _ => unreachable!("bound certificates carry a bound payload"),
            };
            Ok(Some((n, PyCertificate(c))))
        }
        BoundOutcome::Unresolved { .. } => Ok(None),
    }
}

/// Per-color depth report as JSON.
#[pyfunction]
#[pyo3(signature = (low, high, maxlen, a=vec!["1".to_owned()], b=vec!["1".to_owned(), "2".to_owned()], workers=1, budget=None))]
fn separation_depth(
    low: i64,
    high: i64,
    maxlen: usize,
    a: Vec<String>,
    b: Vec<String>,
    workers: usize,
    budget: Option<u64>,
) -> PyResult<String> {
    let a = compress(&rationals(&a)?).map_err(invalid)?;
    let b = compress(&rationals(&b)?).map_err(invalid)?;
    let rep = search::separation_depth_search((low, high), maxlen, &a, &b, &options(workers, budget))
        .map_err(search_err)?;
    Ok(serde_json::to_string(&rep).expect("reports serialize"))
}

#[pyfunction]
fn ex16_witness(y: Vec<String>) -> PyResult<Vec<String>> {
    Ok(strings(&construct::ex16_witness(&rationals(&y)?).map_err(invalid)?))
}

#[pyfunction]
fn ex17_witness(y: Vec<String>) -> PyResult<Vec<String>> {
    Ok(strings(&construct::ex17_witness(&rationals(&y)?).map_err(invalid)?))
}

#[pyfunction]
#[pyo3(signature = (x, bound="1"))]
fn ex16_obstruction(x: Vec<String>, bound: &str) -> PyResult<usize> {
    construct::ex16_obstruction(&rationals(&x)?, &rational(bound)?).map_err(invalid)
}

/// Witness for `diag(m, identity)` monochromatic under `phi` inside `(0, epsilon)`.
#[pyfunction]
#[pyo3(signature = (m, phi, epsilon, max_k=16, workers=1))]
fn extension_pipeline(m: &PyMatrix, phi: &PyColoring, epsilon: &str, max_k: usize, workers: usize) -> PyResult<PyCertificate> {
    let n = construct::TruncationSolver {
        n: SparseMatrix::identity(1).with_family("identity").with_truncation(Some(1)),
    };
    let config = construct::PipelineConfig {
        max_k,
        search: options(workers, None),
    };
    let (cert, _) = construct::extension_pipeline(&m.0, &n, &phi.0, &rational(epsilon)?, &config).map_err(invalid)?;
    Ok(PyCertificate(cert))
}

#[pymodule]
fn ipr_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BudgetExhausted", m.py().get_type::<BudgetExhausted>())?;
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyColoring>()?;
    m.add_class::<PyCertificate>()?;
    m.add_function(wrap_pyfunction!(dyadic_phi, m)?)?;
    m.add_function(wrap_pyfunction!(dyadic_three_color, m)?)?;
    m.add_function(wrap_pyfunction!(dyadic_support, m)?)?;
    m.add_function(wrap_pyfunction!(mt_enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(find_witness, m)?)?;
    m.add_function(wrap_pyfunction!(find_avoiding_coloring, m)?)?;
    m.add_function(wrap_pyfunction!(compactness_bound, m)?)?;
    m.add_function(wrap_pyfunction!(separation_depth, m)?)?;
    m.add_function(wrap_pyfunction!(ex16_witness, m)?)?;
    m.add_function(wrap_pyfunction!(ex17_witness, m)?)?;
    m.add_function(wrap_pyfunction!(ex16_obstruction, m)?)?;
    m.add_function(wrap_pyfunction!(extension_pipeline, m)?)?;
    m.add("__version__", ipr_core::ENGINE_VERSION)?;
    Ok(())
}

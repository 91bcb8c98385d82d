use std::collections::BTreeMap;

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use conrel::generator::{self, Plan};
use conrel::graph::{EdgeLabel, RelationshipGraph};
use conrel::pairwise::Relation;
use conrel::report::{AnalysisConfig, Namer};
use conrel::{Error, GradientMode, SamplingStrategy};

fn to_py_err(e: Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Converts any serializable value into plain Python objects.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    PyModule::import(py, "json")?.call_method1("loads", (text,))
}

fn parse_arg<T: std::str::FromStr<Err = String>>(value: &str) -> PyResult<T> {
    value.parse().map_err(PyValueError::new_err)
}

type Matrix = Vec<Vec<f64>>;
type PairLabels = BTreeMap<(String, String), String>;

#[pyclass(name = "Problem", module = "pyconrel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyProblem {
    inner: conrel::Problem,
}

impl PyProblem {
    fn index(&self, name: &str) -> PyResult<usize> {
        self.inner
            .constraint_index(name)
            .ok_or_else(|| PyValueError::new_err(format!("no constraint named `{name}`")))
    }
}

#[pymethods]
impl PyProblem {
    #[staticmethod]
    fn from_json(document: &str) -> PyResult<Self> {
        conrel::Problem::from_json(document)
            .map(|inner| PyProblem { inner })
            .map_err(to_py_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn variable_names(&self) -> Vec<String> {
        self.inner
            .variables()
            .iter()
            .map(|v| v.name.clone())
            .collect()
    }

    #[getter]
    fn constraint_names(&self) -> Vec<String> {
        self.inner
            .constraints()
            .iter()
            .map(|c| c.name.clone())
            .collect()
    }

    fn constraint_value(&self, name: &str, point: Vec<f64>) -> PyResult<f64> {
        self.inner
            .constraint_value(self.index(name)?, &point)
            .map_err(to_py_err)
    }

    #[pyo3(signature = (point, eps_feas = conrel::problem::DEFAULT_EPS_FEAS))]
    fn feasibility(&self, point: Vec<f64>, eps_feas: f64) -> PyResult<(Vec<bool>, bool)> {
        let f = self
            .inner
            .feasibility(&point, eps_feas)
            .map_err(to_py_err)?;
        Ok((f.per_constraint, f.overall))
    }

    /// Returns `(points, values)` as nested lists.
    #[pyo3(signature = (count, seed, strategy = "lhs"))]
    fn sample(&self, count: usize, seed: u64, strategy: &str) -> PyResult<(Matrix, Matrix)> {
        let s = self
            .inner
            .sample(count, seed, parse_arg::<SamplingStrategy>(strategy)?)
            .map_err(to_py_err)?;
        Ok((s.points().to_vec(), s.values().to_vec()))
    }

    #[pyo3(signature = (name, point, mode = "symbolic", step = conrel::gradient::DEFAULT_STEP))]
    fn gradient(&self, name: &str, point: Vec<f64>, mode: &str, step: f64) -> PyResult<Vec<f64>> {
        conrel::gradient(
            &self.inner,
            self.index(name)?,
            &point,
            parse_arg::<GradientMode>(mode)?,
            step,
        )
        .map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(name={:?}, n={}, m={})",
            self.inner.name(),
            self.inner.dimension(),
            self.inner.constraint_count()
        )
    }
}

/// The conflicting, harmonious and independent example problems.
#[pyfunction]
fn paper_suite() -> Vec<PyProblem> {
    generator::paper_suite()
        .into_iter()
        .map(|inner| PyProblem { inner })
        .collect()
}

/// Full analysis; returns the report as a dict.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (problem, seed, samples = 200, strategy = "lhs", eps_tie = 1e-12, eps_feas = 1e-6, gradients = "symbolic"))]
fn analyze<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    seed: u64,
    samples: usize,
    strategy: &str,
    eps_tie: f64,
    eps_feas: f64,
    gradients: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let config = AnalysisConfig {
        samples,
        strategy: parse_arg(strategy)?,
        eps_tie,
        eps_feas,
        gradient_mode: parse_arg(gradients)?,
        ..AnalysisConfig::with_seed(seed)
    };
    let report = conrel::analyze(&problem.inner, &config).map_err(to_py_err)?;
    to_py(py, &report)
}

/// Pairwise verdict for two named constraints.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (problem, i, j, seed, samples = 200, strategy = "lhs", eps_tie = 1e-12))]
fn analyze_pair<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    i: &str,
    j: &str,
    seed: u64,
    samples: usize,
    strategy: &str,
    eps_tie: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let config = AnalysisConfig {
        samples,
        strategy: parse_arg(strategy)?,
        ..AnalysisConfig::with_seed(seed)
    };
    let set = config.sample(&problem.inner).map_err(to_py_err)?;
    let verdict = conrel::analyze_pair(
        &problem.inner,
        problem.index(i)?,
        problem.index(j)?,
        &set,
        eps_tie,
    )
    .map_err(to_py_err)?;
    to_py(py, &Namer::new(&problem.inner).pair(&verdict, &config))
}

/// `"HARMONY"`, `"CONFLICT"` or `"TIE"`.
#[pyfunction]
#[pyo3(signature = (fi_a, fi_b, fj_a, fj_b, eps_tie = 0.0))]
fn compare_pair(fi_a: f64, fi_b: f64, fj_a: f64, fj_b: f64, eps_tie: f64) -> &'static str {
    match conrel::compare_pair(fi_a, fi_b, fj_a, fj_b, eps_tie) {
        Relation::Harmony => "HARMONY",
        Relation::Conflict => "CONFLICT",
        Relation::Tie => "TIE",
    }
}

/// `(harmony, conflict, tie, total)` pair counts for two value lists.
#[pyfunction]
#[pyo3(signature = (values_i, values_j, eps_tie = 1e-12))]
fn pair_evidence(
    values_i: Vec<f64>,
    values_j: Vec<f64>,
    eps_tie: f64,
) -> PyResult<(u64, u64, u64, u64)> {
    let e = conrel::pairwise::pair_evidence(&values_i, &values_j, eps_tie).map_err(to_py_err)?;
    Ok((
        e.harmony_pairs,
        e.conflict_pairs,
        e.tie_pairs,
        e.total_pairs,
    ))
}

#[pyfunction]
#[pyo3(signature = (values_i, values_j, eps_tie = 1e-12))]
fn crossing_count(values_i: Vec<f64>, values_j: Vec<f64>, eps_tie: f64) -> PyResult<u64> {
    conrel::crossing_count(&values_i, &values_j, eps_tie).map_err(to_py_err)
}

/// Bisector decomposition of two gradients as a dict.
#[pyfunction]
fn angle_decomposition<'py>(
    py: Python<'py>,
    gi: Vec<f64>,
    gj: Vec<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &conrel::angle_decomposition(&gi, &gj))
}

/// Transitive inference over hand-specified edges `(i, j, label)` where
/// labels are `TH`, `TC`, `MX`, `DG`, `IND` or full names.
#[pyfunction]
fn infer_transitive<'py>(
    py: Python<'py>,
    names: Vec<String>,
    edges: Vec<(usize, usize, String)>,
) -> PyResult<Bound<'py, PyAny>> {
    let labels = edges
        .into_iter()
        .map(|(i, j, label)| {
            let label = match label.to_ascii_uppercase().as_str() {
                "TH" | "TOTAL_HARMONY" => EdgeLabel::TotalHarmony,
                "TC" | "TOTAL_CONFLICT" => EdgeLabel::TotalConflict,
                "MX" | "MIXED" => EdgeLabel::Mixed,
                "DG" | "DEGENERATE" => EdgeLabel::Degenerate,
                "IND" | "INDEPENDENT" => EdgeLabel::Independent,
                "UNK" | "UNKNOWN" => EdgeLabel::Unknown,
                other => return Err(PyValueError::new_err(format!("unknown label `{other}`"))),
            };
            Ok((i, j, label))
        })
        .collect::<PyResult<Vec<_>>>()?;
    let graph = RelationshipGraph::from_labels(names, &labels).map_err(to_py_err)?;
    to_py(py, &conrel::infer_transitive(&graph))
}

/// Returns `(problem, labels)` where labels maps `(name_i, name_j)` to a
/// label string.
#[pyfunction]
#[pyo3(signature = (n, m, seed, plan = "random"))]
fn generate_affine(n: usize, m: usize, seed: u64, plan: &str) -> PyResult<(PyProblem, PairLabels)> {
    let plan: Plan = parse_arg(plan)?;
    let planted = generator::generate_affine(n, m, seed, &plan).map_err(to_py_err)?;
    let labels = planted
        .labels_file()
        .pairs
        .into_iter()
        .map(|e| ((e.i, e.j), e.label.to_string()))
        .collect();
    Ok((
        PyProblem {
            inner: planted.problem,
        },
        labels,
    ))
}

/// Evaluates an expression with keyword-style bindings.
#[pyfunction]
fn evaluate(source: &str, bindings: BTreeMap<String, f64>) -> PyResult<f64> {
    let expr = conrel::parse(source).map_err(|e| PyValueError::new_err(e.to_string()))?;
    expr.eval_with(&|name: &str| bindings.get(name).copied())
        .map_err(|e| PyArithmeticError::new_err(e.to_string()))
}

/// Symbolic derivative, returned as expression text.
#[pyfunction]
fn differentiate(source: &str, var: &str) -> PyResult<String> {
    let expr = conrel::parse(source).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(expr.differentiate(var).to_string())
}

#[pymodule]
pub fn pyconrel(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(paper_suite, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_pair, m)?)?;
    m.add_function(wrap_pyfunction!(compare_pair, m)?)?;
    m.add_function(wrap_pyfunction!(pair_evidence, m)?)?;
    m.add_function(wrap_pyfunction!(crossing_count, m)?)?;
    m.add_function(wrap_pyfunction!(angle_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(infer_transitive, m)?)?;
    m.add_function(wrap_pyfunction!(generate_affine, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(differentiate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

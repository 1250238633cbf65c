//! Python bindings: a thin mirror of the library API. Matrices cross the
//! boundary as lists of rows, reports as dicts, errors as ValueError.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ddpath::conditions::{ConditionReport, PositiveConeOpts};
use ddpath::ensemble::{EnsembleSpec, MatrixDistribution};
use ddpath::homotopy::{monotonicity_audit, PathOpts};
use ddpath::matrix::IndexSet;
use ddpath::tv::TvProblem;
use ddpath::{DenseMatrix, LassoProblem};

fn err(e: ddpath::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Dense row-major matrix.
#[pyclass(name = "Matrix", skip_from_py_object)]
#[derive(Clone)]
struct Matrix {
    inner: DenseMatrix,
}

#[pymethods]
impl Matrix {
    #[new]
    fn new(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(Self {
            inner: DenseMatrix::from_rows(&rows).map_err(err)?,
        })
    }

    #[staticmethod]
    fn identity(n: usize) -> PyResult<Self> {
        if n == 0 {
            return Err(PyValueError::new_err("dimension must be positive"));
        }
        Ok(Self {
            inner: DenseMatrix::identity(n),
        })
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    fn tolist(&self) -> Vec<Vec<f64>> {
        (0..self.inner.rows())
            .map(|i| self.inner.row(i).to_vec())
            .collect()
    }

    fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    fn __repr__(&self) -> String {
        format!("Matrix({}x{})", self.inner.rows(), self.inner.cols())
    }
}

fn index_set(indices: Vec<usize>) -> PyResult<IndexSet> {
    IndexSet::new(indices).map_err(err)
}

fn report_dict<'py>(py: Python<'py>, r: &ConditionReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("condition", &r.condition)?;
    d.set_item("holds", r.holds)?;
    d.set_item("dominance", r.dominance.map(|c| c.to_string()))?;
    d.set_item("mu", r.mu)?;
    d.set_item("k_bound", r.k_bound)?;
    d.set_item("witness", r.witness.as_deref())?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (h, eps=0.0))]
fn classify_dominance(h: &Matrix, eps: f64) -> PyResult<String> {
    Ok(ddpath::classify_dominance_eps(&h.inner, eps)
        .map_err(err)?
        .to_string())
}

#[pyfunction]
fn gram(a: &Matrix) -> Matrix {
    Matrix {
        inner: ddpath::gram(&a.inner),
    }
}

#[pyfunction]
fn invert_spd(g: &Matrix) -> PyResult<Matrix> {
    Ok(Matrix {
        inner: ddpath::invert_spd(&g.inner).map_err(err)?,
    })
}

#[pyfunction]
fn principal_submatrix(h: &Matrix, indices: Vec<usize>) -> PyResult<Matrix> {
    Ok(Matrix {
        inner: ddpath::principal_submatrix(&h.inner, &index_set(indices)?).map_err(err)?,
    })
}

#[pyfunction]
fn schur_reduce_last(h: &Matrix) -> PyResult<Matrix> {
    Ok(Matrix {
        inner: ddpath::schur_reduce_last(&h.inner).map_err(err)?,
    })
}

#[pyfunction]
fn inverse_of_submatrix_inverse(h: &Matrix, indices: Vec<usize>) -> PyResult<Matrix> {
    Ok(Matrix {
        inner: ddpath::inverse_of_submatrix_inverse(&h.inner, &index_set(indices)?)
            .map_err(err)?,
    })
}

#[pyfunction]
fn mutual_coherence(a: &Matrix) -> PyResult<f64> {
    ddpath::mutual_coherence(&a.inner).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (a, eps=0.0, allow_wide=false))]
fn check_gram_inverse_dominance<'py>(
    py: Python<'py>,
    a: &Matrix,
    eps: f64,
    allow_wide: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let r = ddpath::check_gram_inverse_dominance_eps(&a.inner, eps, allow_wide).map_err(err)?;
    report_dict(py, &r)
}

#[pyfunction]
fn check_kstep_bound<'py>(py: Python<'py>, a: &Matrix, k: usize) -> PyResult<Bound<'py, PyDict>> {
    let r = ddpath::check_kstep_bound(&a.inner, k).map_err(err)?;
    report_dict(py, &r)
}

#[pyfunction]
fn check_coherence_bound<'py>(py: Python<'py>, g: &Matrix) -> PyResult<Bound<'py, PyDict>> {
    let r = ddpath::check_coherence_bound(&g.inner).map_err(err)?;
    report_dict(py, &r)
}

#[pyfunction]
#[pyo3(signature = (a, max_n=10, exhaustive=false))]
fn check_positive_cone<'py>(
    py: Python<'py>,
    a: &Matrix,
    max_n: usize,
    exhaustive: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = PositiveConeOpts {
        max_n,
        exhaustive,
        ..PositiveConeOpts::default()
    };
    let r = ddpath::check_positive_cone(&a.inner, &opts).map_err(err)?;
    report_dict(py, &r)
}

#[pyfunction]
fn check_operator_dominance<'py>(py: Python<'py>, d: &Matrix) -> PyResult<Bound<'py, PyDict>> {
    let r = ddpath::check_operator_dominance(&d.inner).map_err(err)?;
    report_dict(py, &r)
}

/// Piecewise-linear solution path.
#[pyclass(name = "Path")]
struct Path {
    inner: ddpath::SolutionPath,
}

#[pymethods]
impl Path {
    #[getter]
    fn lambda_start(&self) -> f64 {
        self.inner.lambda_start()
    }

    #[getter]
    fn lambda_end(&self) -> f64 {
        self.inner.lambda_end()
    }

    fn breakpoints<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .breakpoints()
            .iter()
            .map(|bp| {
                let d = PyDict::new(py);
                d.set_item("lambda", bp.lambda)?;
                d.set_item("event", bp.event.to_string())?;
                d.set_item("u", bp.u.clone())?;
                d.set_item("active", bp.active.indices().to_vec())?;
                d.set_item("signs", bp.signs.clone())?;
                Ok(d)
            })
            .collect()
    }

    fn eval(&self, lam: f64) -> PyResult<Vec<f64>> {
        self.inner.eval(lam).map_err(err)
    }

    fn pareto(&self) -> Vec<(f64, f64)> {
        self.inner.pareto()
    }

    fn audit<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let a = monotonicity_audit(&self.inner);
        let d = PyDict::new(py);
        d.set_item("cardinality_monotone", a.cardinality_monotone)?;
        d.set_item("magnitude_monotone", a.magnitude_monotone)?;
        d.set_item(
            "issues",
            a.issues.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
        )?;
        Ok(d)
    }

    fn to_csv(&self) -> String {
        ddpath::io::path_to_csv(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.breakpoints().len()
    }
}

#[pyfunction]
#[pyo3(signature = (a, y, lambda_min=0.0))]
fn solve_path(a: &Matrix, y: Vec<f64>, lambda_min: f64) -> PyResult<Path> {
    let p = LassoProblem::new(a.inner.clone(), y).map_err(err)?;
    let opts = PathOpts {
        lambda_min,
        ..PathOpts::default()
    };
    Ok(Path {
        inner: ddpath::solve_path(&p, &opts).map_err(err)?,
    })
}

#[pyfunction]
fn oracle_solve(a: &Matrix, y: Vec<f64>, lam: f64) -> PyResult<Vec<f64>> {
    let p = LassoProblem::new(a.inner.clone(), y).map_err(err)?;
    ddpath::oracle_solve(&p, lam).map_err(err)
}

#[pyfunction]
fn subgradient_check(a: &Matrix, y: Vec<f64>, lam: f64, u: Vec<f64>, tol: f64) -> PyResult<bool> {
    let p = LassoProblem::new(a.inner.clone(), y).map_err(err)?;
    ddpath::subgradient_check(&p, lam, &u, tol).map_err(err)
}

/// Total-variation path: the reduced coefficient path plus recovered
/// signals.
#[pyclass(name = "TvPath")]
struct TvPath {
    inner: ddpath::TvPath,
}

#[pymethods]
impl TvPath {
    fn breakpoints<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .lasso_path
            .breakpoints()
            .iter()
            .zip(&self.inner.x_breakpoints)
            .map(|(bp, x)| {
                let d = PyDict::new(py);
                d.set_item("lambda", bp.lambda)?;
                d.set_item("event", bp.event.to_string())?;
                d.set_item("x", x.clone())?;
                d.set_item("u", bp.u.clone())?;
                Ok(d)
            })
            .collect()
    }

    fn to_csv(&self) -> String {
        ddpath::io::tv_path_to_csv(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.lasso_path.breakpoints().len()
    }
}

#[pyfunction]
fn first_difference(n: usize) -> PyResult<Matrix> {
    Ok(Matrix {
        inner: ddpath::first_difference_matrix(n).map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (y, d=None, lambda_min=0.0))]
fn solve_tv_path(y: Vec<f64>, d: Option<&Matrix>, lambda_min: f64) -> PyResult<TvPath> {
    let op = match d {
        Some(m) => m.inner.clone(),
        None => ddpath::first_difference_matrix(y.len()).map_err(err)?,
    };
    let t = TvProblem::new(y, op).map_err(err)?;
    let opts = PathOpts {
        lambda_min,
        ..PathOpts::default()
    };
    Ok(TvPath {
        inner: ddpath::solve_tv_path(&t, &opts).map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (dist, m, n, trials, seed, p=None, allow_wide=false))]
fn run_frequency_study<'py>(
    py: Python<'py>,
    dist: &str,
    m: usize,
    n: usize,
    trials: usize,
    seed: u64,
    p: Option<f64>,
    allow_wide: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let distribution = match dist {
        "normal" => MatrixDistribution::Normal,
        "uniform01" => MatrixDistribution::Uniform01,
        "bernoulli" => MatrixDistribution::Bernoulli(p.unwrap_or(0.5)),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown distribution {other:?}; expected normal, uniform01 or bernoulli"
            )))
        }
    };
    let spec = EnsembleSpec::new(distribution, m, n, trials, seed).map_err(err)?;
    let rep = if allow_wide {
        ddpath::run_frequency_study_allow_wide(&spec).map_err(err)?
    } else {
        ddpath::run_frequency_study(&spec).map_err(err)?
    };
    let d = PyDict::new(py);
    d.set_item("distribution", rep.spec.distribution.name())?;
    d.set_item("p", rep.spec.distribution.parameter())?;
    d.set_item("m", rep.spec.m)?;
    d.set_item("n", rep.spec.n)?;
    d.set_item("trials", rep.spec.trials)?;
    d.set_item("dd", rep.dd_count)?;
    d.set_item("non_dd", rep.non_dd_count)?;
    d.set_item("singular", rep.singular_count)?;
    d.set_item("frequency", rep.frequency())?;
    d.set_item("caveat", rep.caveat.as_deref())?;
    Ok(d)
}

#[pymodule]
fn ddpath_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Matrix>()?;
    m.add_class::<Path>()?;
    m.add_class::<TvPath>()?;
    m.add_function(wrap_pyfunction!(classify_dominance, m)?)?;
    m.add_function(wrap_pyfunction!(gram, m)?)?;
    m.add_function(wrap_pyfunction!(invert_spd, m)?)?;
    m.add_function(wrap_pyfunction!(principal_submatrix, m)?)?;
    m.add_function(wrap_pyfunction!(schur_reduce_last, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_of_submatrix_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_coherence, m)?)?;
    m.add_function(wrap_pyfunction!(check_gram_inverse_dominance, m)?)?;
    m.add_function(wrap_pyfunction!(check_kstep_bound, m)?)?;
    m.add_function(wrap_pyfunction!(check_coherence_bound, m)?)?;
    m.add_function(wrap_pyfunction!(check_positive_cone, m)?)?;
    m.add_function(wrap_pyfunction!(check_operator_dominance, m)?)?;
    m.add_function(wrap_pyfunction!(solve_path, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_solve, m)?)?;
    m.add_function(wrap_pyfunction!(subgradient_check, m)?)?;
    m.add_function(wrap_pyfunction!(first_difference, m)?)?;
    m.add_function(wrap_pyfunction!(solve_tv_path, m)?)?;
    m.add_function(wrap_pyfunction!(run_frequency_study, m)?)?;
    Ok(())
}

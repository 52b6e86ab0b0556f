//! Python module `cat_tr`: corpus problems, the CAT and classic solvers, the
//! subproblem solver and the benchmark statistic.
//!
//! Vectors cross the boundary as lists of floats and matrices as lists of
//! rows.

use cat_core::classic::{cat_theta_ablation, classic_minimize, ClassicConfig};
use cat_core::driver::{minimize as cat_minimize, CatConfig};
use cat_core::problem::{builtin_corpus, check_derivatives as fd_check, CorpusEntry, Point, ProblemSpec};
use cat_core::trs::{model_value, solve_trs as trs, SubproblemInputs};
use cat_core::MinimizeOutcome;
use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// A problem from the built-in corpus or one of the instance generators.
#[pyclass(module = "cat_tr")]
struct Problem {
    entry: CorpusEntry,
}

impl Problem {
    fn point(&self, x: Vec<f64>) -> PyResult<DVector<f64>> {
        if x.len() != self.entry.problem.dimension() {
            return Err(PyValueError::new_err(format!(
                "expected {} coordinates, got {}",
                self.entry.problem.dimension(),
                x.len()
            )));
        }
        Ok(DVector::from_vec(x))
    }
}

#[pymethods]
impl Problem {
    /// Corpus problem by name.
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        let entry = ProblemSpec::Corpus { name: name.to_string() }.build().map_err(value_err)?;
        Ok(Self { entry })
    }

    /// Linear dynamical system instance with the reference sizes.
    #[staticmethod]
    fn lds(seed: u64) -> PyResult<Self> {
        let entry = ProblemSpec::lds_reference(seed).build().map_err(value_err)?;
        Ok(Self { entry })
    }

    /// 48 x 30 matrix completion instance.
    #[staticmethod]
    fn mc(seed: u64) -> PyResult<Self> {
        let entry = ProblemSpec::mc_reference(seed).build().map_err(value_err)?;
        Ok(Self { entry })
    }

    #[getter]
    fn name(&self) -> String {
        self.entry.name.clone()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.entry.problem.dimension()
    }

    #[getter]
    fn start(&self) -> Vec<f64> {
        self.entry.start.as_vector().iter().copied().collect()
    }

    #[getter]
    fn f_star(&self) -> Option<f64> {
        self.entry.f_star
    }

    fn value(&self, x: Vec<f64>) -> PyResult<f64> {
        Ok(self.entry.problem.value(&self.point(x)?))
    }

    fn gradient(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(self.entry.problem.gradient(&self.point(x)?).iter().copied().collect())
    }

    fn hessian(&self, x: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows_of(&self.entry.problem.hessian(&self.point(x)?)))
    }

    fn __repr__(&self) -> String {
        format!("Problem('{}', dimension={})", self.entry.name, self.entry.problem.dimension())
    }
}

/// Names of the built-in corpus problems.
#[pyfunction]
fn list_problems() -> Vec<&'static str> {
    builtin_corpus().iter().map(|f| f.name).collect()
}

fn outcome_dict<'py>(py: Python<'py>, out: &MinimizeOutcome) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("status", out.status.label())?;
    d.set_item("converged", out.status.is_converged())?;
    d.set_item("iterations", out.iterations())?;
    d.set_item("x", out.x_final.iter().copied().collect::<Vec<f64>>())?;
    d.set_item("f", out.f_final)?;
    d.set_item("grad_norm", out.grad_norm_final)?;
    d.set_item("fevals", out.fevals)?;
    d.set_item("gevals", out.gevals)?;
    d.set_item("hevals", out.hevals)?;
    d.set_item("radii", out.trace.iter().map(|r| r.r).collect::<Vec<f64>>())?;
    d.set_item("rho_hat", out.trace.iter().map(|r| r.rho_hat).collect::<Vec<f64>>())?;
    d.set_item("accepted", out.trace.iter().map(|r| r.accepted).collect::<Vec<bool>>())?;
    Ok(d)
}

/// Minimize a problem. `method` is `cat`, `cat_theta0` or `classic`;
/// `theta` and the gammas only apply to the CAT variants.
#[pyfunction]
#[pyo3(signature = (
    problem, x0=None, method="cat", *, r1=1.0, beta=0.1, theta=0.1, omega=8.0,
    gamma1=0.0, gamma2=0.8, gamma3=1.0, eps=1e-5, max_iter=10_000
))]
#[allow(clippy::too_many_arguments)]
fn minimize<'py>(
    py: Python<'py>,
    problem: &Problem,
    x0: Option<Vec<f64>>,
    method: &str,
    r1: f64,
    beta: f64,
    theta: f64,
    omega: f64,
    gamma1: f64,
    gamma2: f64,
    gamma3: f64,
    eps: f64,
    max_iter: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let x1 = match x0 {
        Some(x) => Point::new(problem.point(x)?).map_err(value_err)?,
        None => problem.entry.start.clone(),
    };
    let cat = CatConfig {
        r1,
        beta,
        theta,
        omega,
        gamma1,
        gamma2,
        gamma3,
        eps,
        max_iter,
    };
    let p = problem.entry.problem.as_ref();
    let out = py
        .detach(|| match method {
            "cat" => cat_minimize(p, &x1, &cat).map_err(|e| e.to_string()),
            "cat_theta0" => cat_theta_ablation(p, &x1, &cat).map_err(|e| e.to_string()),
            "classic" => {
                let cfg = ClassicConfig {
                    r1,
                    beta,
                    omega,
                    gamma2,
                    eps,
                    max_iter,
                    ..ClassicConfig::default()
                };
                classic_minimize(p, &x1, &cfg).map_err(|e| e.to_string())
            }
            other => Err(format!("unknown method `{other}`")),
        })
        .map_err(PyValueError::new_err)?;
    outcome_dict(py, &out)
}

/// Solve `min g'd + d'Hd/2` subject to `|d| <= radius`, accepting any
/// boundary step with `gamma2 * radius <= |d|`.
#[pyfunction]
#[pyo3(signature = (g, h, radius, gamma2=1.0))]
fn solve_trs<'py>(py: Python<'py>, g: Vec<f64>, h: Vec<Vec<f64>>, radius: f64, gamma2: f64) -> PyResult<Bound<'py, PyDict>> {
    let h = matrix_from_rows(&h)?;
    let g = DVector::from_vec(g);
    if g.len() != h.nrows() {
        return Err(PyValueError::new_err("g and H dimensions differ"));
    }
    let sol = trs(&SubproblemInputs::new(&g, &h, radius, gamma2)).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let d = PyDict::new(py);
    d.set_item("d", sol.d.iter().copied().collect::<Vec<f64>>())?;
    d.set_item("delta", sol.delta)?;
    d.set_item("path", sol.path.as_str())?;
    d.set_item("norm_d", sol.norm_d)?;
    d.set_item("model_value", model_value(&g, &h, &sol.d))?;
    Ok(d)
}

/// Largest relative finite-difference errors of the gradient and Hessian,
/// as `(grad_err, hess_err)`.
#[pyfunction]
#[pyo3(signature = (problem, x=None, h=1e-6))]
fn check_derivatives(problem: &Problem, x: Option<Vec<f64>>, h: f64) -> PyResult<(f64, f64)> {
    let x = match x {
        Some(x) => Point::new(problem.point(x)?).map_err(value_err)?,
        None => problem.entry.start.clone(),
    };
    let report = fd_check(problem.entry.problem.as_ref(), &x, h).map_err(value_err)?;
    Ok((report.grad_max_rel_err, report.hess_max_rel_err))
}

/// Geometric mean of iteration counts; `None` marks a failed run, which
/// counts as `cap`.
#[pyfunction]
#[pyo3(signature = (iters, cap=10_000))]
fn geometric_mean_iters(iters: Vec<Option<usize>>, cap: usize) -> PyResult<f64> {
    if iters.is_empty() || cap == 0 {
        return Err(PyValueError::new_err("need at least one run and a positive cap"));
    }
    let mut logs: Vec<f64> = iters.iter().map(|i| (i.unwrap_or(cap).max(1) as f64).ln()).collect();
    logs.sort_by(f64::total_cmp);
    if logs[0] == logs[logs.len() - 1] {
        return Ok(iters[0].unwrap_or(cap).max(1) as f64);
    }
    Ok((logs.iter().sum::<f64>() / logs.len() as f64).exp())
}

#[pymodule]
fn cat_tr(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_function(wrap_pyfunction!(list_problems, m)?)?;
    m.add_function(wrap_pyfunction!(minimize, m)?)?;
    m.add_function(wrap_pyfunction!(solve_trs, m)?)?;
    m.add_function(wrap_pyfunction!(check_derivatives, m)?)?;
    m.add_function(wrap_pyfunction!(geometric_mean_iters, m)?)?;
    Ok(())
}

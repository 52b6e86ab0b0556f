//! Objective functions, the built-in problem corpus and derivative checks.
//!
//! Every problem exposes analytic first and second derivatives. Hessians are
//! assembled in the upper triangle and mirrored, so `H[(i, j)] == H[(j, i)]`
//! holds bit for bit.

mod classic;
mod corpus;
mod instance;
mod lds;
mod mc;
mod quadratic;
mod quartic;
pub(crate) mod rng;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub use classic::{Beale, ChainedRosenbrock, Rosenbrock, Wood};
pub use corpus::{builtin_corpus, corpus_entry, CorpusEntry, CorpusFactory};
pub use instance::{ProblemSpec, DEFAULT_MC_FILL, DEFAULT_MC_LAMBDA, DEFAULT_MC_RANK};
pub use lds::{generate_lds_instance, LdsGroundTruth, LdsProblem};
pub use mc::{generate_mc_instance, MatrixCompletionProblem};
pub use quadratic::QuadraticProblem;
pub use quartic::QuarticProblem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("point has non-finite coordinate {index} ({value})")]
    NonFinitePoint { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("non-finite {quantity} at perturbed coordinate {coordinate}")]
    NonFiniteEvaluation {
        quantity: &'static str,
        coordinate: usize,
    },
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("malformed instance file: {0}")]
    Instance(String),
}

pub(crate) fn param_error(name: &'static str, reason: impl Into<String>) -> ProblemError {
    ProblemError::Parameter {
        name,
        reason: reason.into(),
    }
}

/// A finite point in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(DVector<f64>);

impl Point {
    pub fn new(coords: DVector<f64>) -> Result<Self, ProblemError> {
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(ProblemError::NonFinitePoint { index, value });
        }
        Ok(Self(coords))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self, ProblemError> {
        Self::new(DVector::from_column_slice(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }
}

impl AsRef<DVector<f64>> for Point {
    fn as_ref(&self) -> &DVector<f64> {
        &self.0
    }
}

/// A twice-differentiable function `f: R^n -> R`.
///
/// Implementations are immutable and evaluation is pure, so a problem can be
/// shared between threads.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;

    fn dimension(&self) -> usize;

    fn value(&self, x: &DVector<f64>) -> f64;

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;

    /// Exactly symmetric Hessian.
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64>;

    fn value_and_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        (self.value(x), self.gradient(x))
    }

    /// A Lipschitz constant of the Hessian valid on the segment `[a, b]`,
    /// when one is known in closed form.
    fn hessian_lipschitz_on_segment(&self, _a: &DVector<f64>, _b: &DVector<f64>) -> Option<f64> {
        None
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn dimension(&self) -> usize {
        (**self).dimension()
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (**self).gradient(x)
    }
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        (**self).hessian(x)
    }
    fn value_and_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        (**self).value_and_gradient(x)
    }
    fn hessian_lipschitz_on_segment(&self, a: &DVector<f64>, b: &DVector<f64>) -> Option<f64> {
        (**self).hessian_lipschitz_on_segment(a, b)
    }
}

/// Mirror the upper triangle into the lower one.
pub(crate) fn symmetrize_from_upper(h: &mut DMatrix<f64>) {
    h.fill_lower_triangle_with_upper_triangle();
}

/// Accumulates `w * s^2` for a residual `s` whose gradient is sparse.
///
/// Only the upper triangle of `hess` is touched; callers mirror at the end.
pub(crate) fn add_weighted_square(
    weight: f64,
    residual: f64,
    partials: &[(usize, f64)],
    grad: &mut DVector<f64>,
    hess: Option<&mut DMatrix<f64>>,
) {
    for &(i, di) in partials {
        grad[i] += 2.0 * weight * residual * di;
    }
    if let Some(hess) = hess {
        for &(i, di) in partials {
            for &(j, dj) in partials {
                if i <= j {
                    hess[(i, j)] += 2.0 * weight * di * dj;
                }
            }
        }
    }
}

/// Add `value` to the symmetric pair `(i, j)`, `(j, i)` through the upper triangle.
pub(crate) fn add_upper(hess: &mut DMatrix<f64>, i: usize, j: usize, value: f64) {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    if a == b {
        hess[(a, a)] += 2.0 * value;
    } else {
        hess[(a, b)] += value;
    }
}

/// Result of comparing analytic derivatives with central differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeReport {
    pub grad_max_rel_err: f64,
    pub hess_max_rel_err: f64,
}

impl DerivativeReport {
    pub fn max_error(&self) -> f64 {
        self.grad_max_rel_err.max(self.hess_max_rel_err)
    }
}

/// Central-difference check of `gradient` against `value` and of `hessian`
/// against `gradient`.
///
/// Each error is `max|fd - analytic| / (1 + max|analytic|)`.
pub fn check_derivatives<P: Objective + ?Sized>(
    p: &P,
    x: &Point,
    h: f64,
) -> Result<DerivativeReport, ProblemError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(param_error("h", format!("step must be positive, got {h}")));
    }
    let n = p.dimension();
    if x.dimension() != n {
        return Err(ProblemError::Dimension {
            expected: n,
            got: x.dimension(),
        });
    }
    let x0 = x.as_vector();
    let grad = p.gradient(x0);
    let hess = p.hessian(x0);

    let mut fd_grad = DVector::zeros(n);
    let mut fd_hess = DMatrix::zeros(n, n);
    let mut xp = x0.clone();
    for i in 0..n {
        let xi = x0[i];
        xp[i] = xi + h;
        let (fp, gp) = p.value_and_gradient(&xp);
        xp[i] = xi - h;
        let (fm, gm) = p.value_and_gradient(&xp);
        xp[i] = xi;
        if !(fp.is_finite() && fm.is_finite()) {
            return Err(ProblemError::NonFiniteEvaluation {
                quantity: "value",
                coordinate: i,
            });
        }
        if gp.iter().chain(gm.iter()).any(|v| !v.is_finite()) {
            return Err(ProblemError::NonFiniteEvaluation {
                quantity: "gradient",
                coordinate: i,
            });
        }
        fd_grad[i] = (fp - fm) / (2.0 * h);
        fd_hess.set_column(i, &((gp - gm) / (2.0 * h)));
    }

    let rel = |diff: f64, scale: f64| diff / (1.0 + scale);
    Ok(DerivativeReport {
        grad_max_rel_err: rel((&fd_grad - &grad).amax(), grad.amax()),
        hess_max_rel_err: rel((&fd_hess - &hess).amax(), hess.amax()),
    })
}

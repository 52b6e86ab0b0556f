use nalgebra::{DMatrix, DVector};

use super::{param_error, Objective, ProblemError};

/// `f(x) = 1/2 x'Ax + b'x + 1/4 sum x_i^4`.
///
/// The Hessian `A + 3 diag(x_i^2)` changes by `3 diag((p_i - q_i)(p_i + q_i))`
/// between two points, so on a segment `[a, b]` it is Lipschitz with constant
/// `6 max_i max(|a_i|, |b_i|)`.
#[derive(Debug, Clone)]
pub struct QuarticProblem {
    name: String,
    a: DMatrix<f64>,
    b: DVector<f64>,
}

impl QuarticProblem {
    pub fn new(
        name: impl Into<String>,
        mut a: DMatrix<f64>,
        b: DVector<f64>,
    ) -> Result<Self, ProblemError> {
        if !a.is_square() || a.nrows() != b.len() || b.is_empty() {
            return Err(param_error("a", "quadratic part must be n x n with n = len(b)"));
        }
        super::symmetrize_from_upper(&mut a);
        Ok(Self {
            name: name.into(),
            a,
            b,
        })
    }
}

impl Objective for QuarticProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let quartic: f64 = x.iter().map(|v| v.powi(4)).sum();
        0.5 * x.dot(&(&self.a * x)) + self.b.dot(x) + 0.25 * quartic
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x + &self.b + x.map(|v| v.powi(3))
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut h = self.a.clone();
        for i in 0..x.len() {
            h[(i, i)] += 3.0 * x[i] * x[i];
        }
        h
    }

    fn hessian_lipschitz_on_segment(&self, a: &DVector<f64>, b: &DVector<f64>) -> Option<f64> {
        let m = a
            .iter()
            .zip(b.iter())
            .map(|(u, v)| u.abs().max(v.abs()))
            .fold(0.0, f64::max);
        Some(6.0 * m)
    }
}

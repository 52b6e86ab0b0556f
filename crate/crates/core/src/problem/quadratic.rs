use nalgebra::{DMatrix, DVector};

use super::{param_error, Objective, ProblemError};

/// `f(x) = 1/2 x'Hx + g'x + c`.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    name: String,
    h: DMatrix<f64>,
    g: DVector<f64>,
    c: f64,
}

impl QuadraticProblem {
    /// `h` is symmetrized from its upper triangle.
    pub fn new(
        name: impl Into<String>,
        mut h: DMatrix<f64>,
        g: DVector<f64>,
        c: f64,
    ) -> Result<Self, ProblemError> {
        if !h.is_square() || h.nrows() != g.len() || g.is_empty() {
            return Err(param_error(
                "h",
                format!("expected {0}x{0} matrix, got {1}x{2}", g.len(), h.nrows(), h.ncols()),
            ));
        }
        super::symmetrize_from_upper(&mut h);
        Ok(Self {
            name: name.into(),
            h,
            g,
            c,
        })
    }

    /// Quadratic with prescribed spectrum `eigenvalues`, eigenvectors from
    /// the QR factor of a seeded Gaussian matrix, and minimizer `x_star`
    /// (for positive-definite spectra).
    pub fn with_spectrum(
        name: impl Into<String>,
        eigenvalues: &[f64],
        x_star: &DVector<f64>,
        seed: u64,
    ) -> Result<Self, ProblemError> {
        let n = eigenvalues.len();
        if n == 0 || x_star.len() != n {
            return Err(param_error("eigenvalues", "spectrum and minimizer sizes differ"));
        }
        let mut rng = super::rng::InstanceRng::new(seed);
        let w = DMatrix::from_fn(n, n, |_, _| rng.normal());
        let q = w.qr().q();
        let h = &q * DMatrix::from_diagonal(&DVector::from_column_slice(eigenvalues)) * q.transpose();
        let g = -(&h * x_star);
        Self::new(name, h, g, 0.0)
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn g(&self) -> &DVector<f64> {
        &self.g
    }

    pub fn offset(&self) -> f64 {
        self.c
    }
}

impl Objective for QuadraticProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.g.len()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.h * x)) + self.g.dot(x) + self.c
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.h * x + &self.g
    }

    fn hessian(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        self.h.clone()
    }

    fn hessian_lipschitz_on_segment(&self, _a: &DVector<f64>, _b: &DVector<f64>) -> Option<f64> {
        Some(0.0)
    }
}

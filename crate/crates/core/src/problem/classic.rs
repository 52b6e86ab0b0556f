//! Textbook smooth test functions with hand-derived derivatives.

use nalgebra::{DMatrix, DVector};

use super::{symmetrize_from_upper, Objective};

/// `100 (y - x^2)^2 + (1 - x)^2`, minimum 0 at `(1, 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rosenbrock;

impl Objective for Rosenbrock {
    fn name(&self) -> &str {
        "rosenbrock2d"
    }

    fn dimension(&self) -> usize {
        2
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let (a, b) = (x[0], x[1]);
        100.0 * (b - a * a).powi(2) + (1.0 - a).powi(2)
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let (a, b) = (x[0], x[1]);
        DVector::from_vec(vec![
            -400.0 * a * (b - a * a) - 2.0 * (1.0 - a),
            200.0 * (b - a * a),
        ])
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let (a, b) = (x[0], x[1]);
        let off = -400.0 * a;
        DMatrix::from_row_slice(2, 2, &[1200.0 * a * a - 400.0 * b + 2.0, off, off, 200.0])
    }
}

/// Chained Rosenbrock `sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2`.
#[derive(Debug, Clone)]
pub struct ChainedRosenbrock {
    n: usize,
    name: String,
}

impl ChainedRosenbrock {
    /// # Panics
    /// If `n < 2`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "chained Rosenbrock needs n >= 2");
        Self {
            n,
            name: format!("chained_rosenbrock{n}"),
        }
    }
}

impl Objective for ChainedRosenbrock {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        (0..self.n - 1)
            .map(|i| 100.0 * (x[i + 1] - x[i] * x[i]).powi(2) + (1.0 - x[i]).powi(2))
            .sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.n);
        for i in 0..self.n - 1 {
            let t = x[i + 1] - x[i] * x[i];
            g[i] += -400.0 * x[i] * t - 2.0 * (1.0 - x[i]);
            g[i + 1] += 200.0 * t;
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n - 1 {
            h[(i, i)] += 1200.0 * x[i] * x[i] - 400.0 * x[i + 1] + 2.0;
            h[(i, i + 1)] += -400.0 * x[i];
            h[(i + 1, i + 1)] += 200.0;
        }
        symmetrize_from_upper(&mut h);
        h
    }
}

/// Beale's function, minimum 0 at `(3, 1/2)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Beale;

const BEALE_C: [f64; 3] = [1.5, 2.25, 2.625];

impl Objective for Beale {
    fn name(&self) -> &str {
        "beale"
    }

    fn dimension(&self) -> usize {
        2
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let (a, b) = (x[0], x[1]);
        BEALE_C
            .iter()
            .zip(1..)
            .map(|(c, k)| (c - a + a * b.powi(k)).powi(2))
            .sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let (a, b) = (x[0], x[1]);
        let mut g = DVector::zeros(2);
        for (c, k) in BEALE_C.iter().zip(1..) {
            let r = c - a + a * b.powi(k);
            g[0] += 2.0 * r * (b.powi(k) - 1.0);
            g[1] += 2.0 * r * f64::from(k) * a * b.powi(k - 1);
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let (a, b) = (x[0], x[1]);
        let mut h = DMatrix::zeros(2, 2);
        for (c, k) in BEALE_C.iter().zip(1..) {
            let kf = f64::from(k);
            let r = c - a + a * b.powi(k);
            let ra = b.powi(k) - 1.0;
            let rb = kf * a * b.powi(k - 1);
            let rab = kf * b.powi(k - 1);
            let rbb = if k >= 2 {
                kf * (kf - 1.0) * a * b.powi(k - 2)
            } else {
                0.0
            };
            h[(0, 0)] += 2.0 * ra * ra;
            h[(0, 1)] += 2.0 * (ra * rb + r * rab);
            h[(1, 1)] += 2.0 * (rb * rb + r * rbb);
        }
        symmetrize_from_upper(&mut h);
        h
    }
}

/// Wood's four-variable function, minimum 0 at `(1, 1, 1, 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Wood;

impl Objective for Wood {
    fn name(&self) -> &str {
        "wood"
    }

    fn dimension(&self) -> usize {
        4
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
        100.0 * (x2 - x1 * x1).powi(2)
            + (1.0 - x1).powi(2)
            + 90.0 * (x4 - x3 * x3).powi(2)
            + (1.0 - x3).powi(2)
            + 10.1 * ((x2 - 1.0).powi(2) + (x4 - 1.0).powi(2))
            + 19.8 * (x2 - 1.0) * (x4 - 1.0)
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
        DVector::from_vec(vec![
            -400.0 * x1 * (x2 - x1 * x1) - 2.0 * (1.0 - x1),
            200.0 * (x2 - x1 * x1) + 20.2 * (x2 - 1.0) + 19.8 * (x4 - 1.0),
            -360.0 * x3 * (x4 - x3 * x3) - 2.0 * (1.0 - x3),
            180.0 * (x4 - x3 * x3) + 20.2 * (x4 - 1.0) + 19.8 * (x2 - 1.0),
        ])
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
        let mut h = DMatrix::zeros(4, 4);
        h[(0, 0)] = 1200.0 * x1 * x1 - 400.0 * x2 + 2.0;
        h[(0, 1)] = -400.0 * x1;
        h[(1, 1)] = 220.2;
        h[(1, 3)] = 19.8;
        h[(2, 2)] = 1080.0 * x3 * x3 - 360.0 * x4 + 2.0;
        h[(2, 3)] = -360.0 * x3;
        h[(3, 3)] = 200.2;
        symmetrize_from_upper(&mut h);
        h
    }
}

//! Regularized low-rank matrix completion with a baseline estimate.
//!
//! For observed entries `(i, j)` in `Omega` the model predicts
//! `mu + r_i + c_j + p_i . q_j`, where `mu` is the mean of the observed
//! entries and stays fixed. The objective is
//!
//! ```text
//! sum_{(i,j) in Omega} (D_ij - mu - r_i - c_j - p_i . q_j)^2
//!                      + l1 (r_i^2 + c_j^2) + l2 (|p_i|^2 + |q_j|^2)
//! ```
//!
//! so the penalties are charged once per observation. Variable layout:
//! `r` (`n1`), `c` (`n2`), `P` (`n1 x rank`, row-major), `Q` (`n2 x rank`,
//! row-major).

use nalgebra::{DMatrix, DVector};

use super::rng::InstanceRng;
use super::{add_upper, add_weighted_square, param_error, symmetrize_from_upper, Objective, ProblemError};

/// Constant level of the synthetic ground-truth matrix.
const TRUE_LEVEL: f64 = 1.0;
/// Scale of the random factor entries in the start point.
const START_FACTOR_SCALE: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct MatrixCompletionProblem {
    name: String,
    n1: usize,
    n2: usize,
    rank: usize,
    fill: f64,
    lambda1: f64,
    lambda2: f64,
    seed: u64,
    truth: DMatrix<f64>,
    observed: Vec<(usize, usize, f64)>,
    mu: f64,
    start: DVector<f64>,
}

/// Build a synthetic instance.
///
/// Draw order from the seeded stream: row offsets, column offsets, the
/// `n1 x rank` and `n2 x rank` factors (row-major), one Bernoulli(`fill`) per
/// entry in row-major order, then the start point's factor entries. If no
/// entry is sampled the diagonal `(i, i)`, `i < min(n1, n2)` is observed
/// instead.
pub fn generate_mc_instance(
    n1: usize,
    n2: usize,
    rank: usize,
    fill: f64,
    lambda1: f64,
    lambda2: f64,
    seed: u64,
) -> Result<MatrixCompletionProblem, ProblemError> {
    if rank < 1 || rank >= n1.min(n2) {
        return Err(param_error(
            "rank",
            format!("need 1 <= rank < min(n1, n2), got rank={rank}, n1={n1}, n2={n2}"),
        ));
    }
    if !(fill > 0.0 && fill <= 1.0) {
        return Err(param_error("fill", format!("need 0 < fill <= 1, got {fill}")));
    }
    if !(lambda1 >= 0.0 && lambda1.is_finite()) {
        return Err(param_error("lambda1", format!("need lambda1 >= 0, got {lambda1}")));
    }
    if !(lambda2 >= 0.0 && lambda2.is_finite()) {
        return Err(param_error("lambda2", format!("need lambda2 >= 0, got {lambda2}")));
    }

    let mut rng = InstanceRng::new(seed);
    let row_off: Vec<f64> = (0..n1).map(|_| rng.normal()).collect();
    let col_off: Vec<f64> = (0..n2).map(|_| rng.normal()).collect();
    let u = DMatrix::from_row_iterator(n1, rank, (0..n1 * rank).map(|_| rng.normal()).collect::<Vec<_>>());
    let v = DMatrix::from_row_iterator(n2, rank, (0..n2 * rank).map(|_| rng.normal()).collect::<Vec<_>>());
    let low_rank = &u * v.transpose();
    let truth = DMatrix::from_fn(n1, n2, |i, j| TRUE_LEVEL + row_off[i] + col_off[j] + low_rank[(i, j)]);

    let mut observed = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            if rng.bernoulli(fill) {
                observed.push((i, j, truth[(i, j)]));
            }
        }
    }
    if observed.is_empty() {
        observed.extend((0..n1.min(n2)).map(|i| (i, i, truth[(i, i)])));
    }
    let mu = observed.iter().map(|&(_, _, v)| v).sum::<f64>() / observed.len() as f64;

    let dim = n1 + n2 + (n1 + n2) * rank;
    let mut start = DVector::zeros(dim);
    for k in n1 + n2..dim {
        start[k] = START_FACTOR_SCALE * rng.normal();
    }

    Ok(MatrixCompletionProblem {
        name: format!("mc_{n1}x{n2}_r{rank}_s{seed}"),
        n1,
        n2,
        rank,
        fill,
        lambda1,
        lambda2,
        seed,
        truth,
        observed,
        mu,
        start,
    })
}

impl MatrixCompletionProblem {
    pub fn shape(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn fill(&self) -> f64 {
        self.fill
    }

    pub fn lambdas(&self) -> (f64, f64) {
        (self.lambda1, self.lambda2)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Observed entries `(i, j, D_ij)` in row-major order.
    pub fn observed(&self) -> &[(usize, usize, f64)] {
        &self.observed
    }

    pub fn mean(&self) -> f64 {
        self.mu
    }

    pub fn ground_truth(&self) -> &DMatrix<f64> {
        &self.truth
    }

    /// Zero offsets and small random factors; the origin itself is a saddle.
    pub fn start_point(&self) -> DVector<f64> {
        self.start.clone()
    }

    fn row_index(&self, i: usize) -> usize {
        i
    }

    fn col_index(&self, j: usize) -> usize {
        self.n1 + j
    }

    fn p_index(&self, i: usize, k: usize) -> usize {
        self.n1 + self.n2 + i * self.rank + k
    }

    fn q_index(&self, j: usize, k: usize) -> usize {
        self.n1 + self.n2 + self.n1 * self.rank + j * self.rank + k
    }

    fn evaluate(
        &self,
        x: &DVector<f64>,
        mut grad: Option<&mut DVector<f64>>,
        mut hess: Option<&mut DMatrix<f64>>,
    ) -> f64 {
        let mut value = 0.0;
        let mut partials = Vec::with_capacity(2 + 2 * self.rank);
        let mut penalized = Vec::with_capacity(2 + 2 * self.rank);
        for &(i, j, dij) in &self.observed {
            let (ri, cj) = (self.row_index(i), self.col_index(j));
            let mut s = dij - self.mu - x[ri] - x[cj];
            for k in 0..self.rank {
                s -= x[self.p_index(i, k)] * x[self.q_index(j, k)];
            }
            value += s * s;

            // Penalties attached to this observation.
            penalized.clear();
            penalized.push((ri, self.lambda1));
            penalized.push((cj, self.lambda1));
            for k in 0..self.rank {
                penalized.push((self.p_index(i, k), self.lambda2));
                penalized.push((self.q_index(j, k), self.lambda2));
            }
            for &(idx, lambda) in &penalized {
                value += lambda * x[idx] * x[idx];
            }

            let Some(g) = grad.as_deref_mut() else {
                continue;
            };
            partials.clear();
            partials.push((ri, -1.0));
            partials.push((cj, -1.0));
            for k in 0..self.rank {
                partials.push((self.p_index(i, k), -x[self.q_index(j, k)]));
                partials.push((self.q_index(j, k), -x[self.p_index(i, k)]));
            }
            add_weighted_square(1.0, s, &partials, g, hess.as_deref_mut());
            for &(idx, lambda) in &penalized {
                g[idx] += 2.0 * lambda * x[idx];
            }
            if let Some(h) = hess.as_deref_mut() {
                for &(idx, lambda) in &penalized {
                    h[(idx, idx)] += 2.0 * lambda;
                }
                // d^2 s / (dP_ik dQ_jk) = -1
                for k in 0..self.rank {
                    add_upper(h, self.p_index(i, k), self.q_index(j, k), -2.0 * s);
                }
            }
        }
        if let Some(h) = hess {
            symmetrize_from_upper(h);
        }
        value
    }
}

impl Objective for MatrixCompletionProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.n1 + self.n2 + (self.n1 + self.n2) * self.rank
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        self.evaluate(x, None, None)
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.value_and_gradient(x).1
    }

    fn value_and_gradient(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let mut g = DVector::zeros(self.dimension());
        let f = self.evaluate(x, Some(&mut g), None);
        (f, g)
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dimension();
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        self.evaluate(x, Some(&mut g), Some(&mut h));
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{check_derivatives, Point};

    #[test]
    fn full_fill_observes_everything() {
        let p = generate_mc_instance(6, 5, 2, 1.0, 0.1, 0.1, 3).unwrap();
        assert_eq!(p.observed().len(), 30);
    }

    #[test]
    fn tiny_fill_falls_back_to_diagonal() {
        let p = generate_mc_instance(7, 4, 2, 1e-12, 0.1, 0.1, 0).unwrap();
        assert!(p.observed().len() >= 4);
        assert!(p.observed().iter().take(4).enumerate().all(|(k, &(i, j, _))| i == k && j == k));
    }

    #[test]
    fn invalid_parameters() {
        assert!(generate_mc_instance(4, 3, 3, 0.5, 0.1, 0.1, 0).is_err());
        assert!(generate_mc_instance(4, 3, 0, 0.5, 0.1, 0.1, 0).is_err());
        assert!(generate_mc_instance(4, 3, 1, 0.0, 0.1, 0.1, 0).is_err());
        assert!(generate_mc_instance(4, 3, 1, 1.5, 0.1, 0.1, 0).is_err());
        assert!(generate_mc_instance(4, 3, 1, 0.5, -0.1, 0.1, 0).is_err());
    }

    #[test]
    fn objective_matches_direct_sum() {
        let p = generate_mc_instance(5, 4, 2, 0.7, 0.3, 0.2, 5).unwrap();
        let mut rng = InstanceRng::new(17);
        let x = DVector::from_fn(p.dimension(), |_, _| rng.normal());
        let (n1, n2, r) = (5, 4, 2);
        let rows = x.rows(0, n1);
        let cols = x.rows(n1, n2);
        let pm = DMatrix::from_row_slice(n1, r, x.rows(n1 + n2, n1 * r).as_slice());
        let qm = DMatrix::from_row_slice(n2, r, x.rows(n1 + n2 + n1 * r, n2 * r).as_slice());
        let mut expected = 0.0;
        for &(i, j, d) in p.observed() {
            let pred = p.mean() + rows[i] + cols[j] + pm.row(i).dot(&qm.row(j));
            expected += (d - pred).powi(2)
                + 0.3 * (rows[i].powi(2) + cols[j].powi(2))
                + 0.2 * (pm.row(i).norm_squared() + qm.row(j).norm_squared());
        }
        assert!((p.value(&x) - expected).abs() < 1e-10 * (1.0 + expected));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = generate_mc_instance(4, 3, 2, 0.8, 0.1, 0.1, 2).unwrap();
        let mut rng = InstanceRng::new(5);
        let x = Point::new(DVector::from_fn(p.dimension(), |_, _| rng.normal())).unwrap();
        let rep = check_derivatives(&p, &x, 1e-5).unwrap();
        assert!(rep.max_error() <= 1e-5, "{rep:?}");
    }

    #[test]
    fn deterministic_per_seed() {
        let a = generate_mc_instance(10, 8, 2, 0.5, 0.1, 0.1, 42).unwrap();
        let b = generate_mc_instance(10, 8, 2, 0.5, 0.1, 0.1, 42).unwrap();
        assert_eq!(a.observed(), b.observed());
        assert_eq!(a.start_point(), b.start_point());
    }
}

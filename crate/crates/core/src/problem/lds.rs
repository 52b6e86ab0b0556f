//! Maximum-likelihood recovery of a linear dynamical system.
//!
//! The system is `h_{t+1} = A h_t + B u_t + xi_t`, `x_t = h_t + v_t` with
//! `u_t, v_t ~ N(0, I)` and `xi_t ~ N(0, sigma^2 I)`. The objective over
//! `(A, B, h_1..h_{T+1})` is
//!
//! ```text
//! sum_{t=1..T} |h_{t+1} - A h_t - B u_t|^2 / sigma^2 + |x_t - h_t|^2
//! ```
//!
//! Both sums run over `t = 1..T`; `h_{T+1}` only enters through the last
//! dynamics residual and has no observation term.
//!
//! Variable layout (row-major blocks): `A` (`d*d`), then `B` (`d*d`), then
//! `h_1, ..., h_{T+1}` (`d` each), giving `2 d^2 + (T + 1) d` unknowns.

use nalgebra::{DMatrix, DVector};

use super::rng::InstanceRng;
use super::{add_upper, add_weighted_square, param_error, symmetrize_from_upper, Objective, ProblemError};

/// Quantities drawn while simulating an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct LdsGroundTruth {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    /// `h_1 .. h_{T+1}`.
    pub hidden: Vec<DVector<f64>>,
    /// Process noise `xi_1 .. xi_T`.
    pub process_noise: Vec<DVector<f64>>,
    /// Observation noise `v_1 .. v_T`.
    pub observation_noise: Vec<DVector<f64>>,
}

#[derive(Debug, Clone)]
pub struct LdsProblem {
    name: String,
    horizon: usize,
    hidden_dim: usize,
    sigma: f64,
    seed: u64,
    observations: Vec<DVector<f64>>,
    controls: Vec<DVector<f64>>,
    truth: LdsGroundTruth,
}

/// Simulate an instance.
///
/// Draw order from the seeded stream: `B` (row-major), the Gaussian matrix
/// whose QR factor `Q` rotates `A = Q' D Q`, the diagonal of `D` from
/// `U[0.9, 0.99)`, `h_1`, then per step `u_t`, `xi_t`, `v_t`.
pub fn generate_lds_instance(
    horizon: usize,
    hidden_dim: usize,
    sigma: f64,
    seed: u64,
) -> Result<LdsProblem, ProblemError> {
    if horizon < 2 {
        return Err(param_error("T", format!("need T >= 2, got {horizon}")));
    }
    if hidden_dim < 1 {
        return Err(param_error("d", "need d >= 1"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(param_error("sigma", format!("need sigma > 0, got {sigma}")));
    }
    let d = hidden_dim;
    let mut rng = InstanceRng::new(seed);
    let b = DMatrix::from_row_iterator(d, d, (0..d * d).map(|_| rng.normal()).collect::<Vec<_>>());
    let w = DMatrix::from_row_iterator(d, d, (0..d * d).map(|_| rng.normal()).collect::<Vec<_>>());
    let q = w.qr().q();
    let diag = DVector::from_iterator(d, (0..d).map(|_| rng.uniform(0.9, 0.99)));
    let a = q.transpose() * DMatrix::from_diagonal(&diag) * &q;

    let mut hidden = Vec::with_capacity(horizon + 1);
    hidden.push(DVector::from_iterator(d, (0..d).map(|_| rng.normal())));
    let mut controls = Vec::with_capacity(horizon);
    let mut observations = Vec::with_capacity(horizon);
    let mut process_noise = Vec::with_capacity(horizon);
    let mut observation_noise = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let u = DVector::from_iterator(d, (0..d).map(|_| rng.normal()));
        let xi = DVector::from_iterator(d, (0..d).map(|_| sigma * rng.normal()));
        let v = DVector::from_iterator(d, (0..d).map(|_| rng.normal()));
        observations.push(&hidden[t] + &v);
        let next = &a * &hidden[t] + &b * &u + &xi;
        hidden.push(next);
        controls.push(u);
        process_noise.push(xi);
        observation_noise.push(v);
    }

    Ok(LdsProblem {
        name: format!("lds_T{horizon}_d{d}_s{seed}"),
        horizon,
        hidden_dim: d,
        sigma,
        seed,
        observations,
        controls,
        truth: LdsGroundTruth {
            a,
            b,
            hidden,
            process_noise,
            observation_noise,
        },
    })
}

impl LdsProblem {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn observations(&self) -> &[DVector<f64>] {
        &self.observations
    }

    pub fn controls(&self) -> &[DVector<f64>] {
        &self.controls
    }

    pub fn ground_truth(&self) -> &LdsGroundTruth {
        &self.truth
    }

    fn a_index(&self, i: usize, j: usize) -> usize {
        i * self.hidden_dim + j
    }

    fn b_index(&self, i: usize, j: usize) -> usize {
        self.hidden_dim * self.hidden_dim + i * self.hidden_dim + j
    }

    /// Index of `h_t[i]` for `t` counted from 0 (`h_1` is `t = 0`).
    fn h_index(&self, t: usize, i: usize) -> usize {
        2 * self.hidden_dim * self.hidden_dim + t * self.hidden_dim + i
    }

    /// Flatten `(A, B, h)` into the decision vector.
    pub fn pack(&self, a: &DMatrix<f64>, b: &DMatrix<f64>, hidden: &[DVector<f64>]) -> DVector<f64> {
        let d = self.hidden_dim;
        let mut x = DVector::zeros(self.dimension());
        for i in 0..d {
            for j in 0..d {
                x[self.a_index(i, j)] = a[(i, j)];
                x[self.b_index(i, j)] = b[(i, j)];
            }
        }
        for (t, h) in hidden.iter().enumerate() {
            for i in 0..d {
                x[self.h_index(t, i)] = h[i];
            }
        }
        x
    }

    /// `A = I/2`, `B = 0`, `h_t = x_t` for `t <= T` and `h_{T+1} = x_T`.
    pub fn start_point(&self) -> DVector<f64> {
        let d = self.hidden_dim;
        let a = DMatrix::from_diagonal_element(d, d, 0.5);
        let b = DMatrix::zeros(d, d);
        let mut hidden = self.observations.clone();
        hidden.push(self.observations[self.horizon - 1].clone());
        self.pack(&a, &b, &hidden)
    }

    /// Decision vector of the simulated parameters and trajectory.
    pub fn truth_point(&self) -> DVector<f64> {
        self.pack(&self.truth.a, &self.truth.b, &self.truth.hidden)
    }

    fn evaluate(
        &self,
        x: &DVector<f64>,
        mut grad: Option<&mut DVector<f64>>,
        mut hess: Option<&mut DMatrix<f64>>,
    ) -> f64 {
        let d = self.hidden_dim;
        let w = 1.0 / (self.sigma * self.sigma);
        let mut value = 0.0;
        let mut partials = Vec::with_capacity(3 * d + 1);

        for t in 0..self.horizon {
            let u = &self.controls[t];
            for i in 0..d {
                let mut e = x[self.h_index(t + 1, i)];
                for j in 0..d {
                    e -= x[self.a_index(i, j)] * x[self.h_index(t, j)];
                    e -= x[self.b_index(i, j)] * u[j];
                }
                value += w * e * e;
                let Some(g) = grad.as_deref_mut() else {
                    continue;
                };
                partials.clear();
                partials.push((self.h_index(t + 1, i), 1.0));
                for j in 0..d {
                    partials.push((self.h_index(t, j), -x[self.a_index(i, j)]));
                    partials.push((self.a_index(i, j), -x[self.h_index(t, j)]));
                    partials.push((self.b_index(i, j), -u[j]));
                }
                add_weighted_square(w, e, &partials, g, hess.as_deref_mut());
                if let Some(h) = hess.as_deref_mut() {
                    // d^2 e / (dA_ij dh_t[j]) = -1
                    for j in 0..d {
                        add_upper(h, self.a_index(i, j), self.h_index(t, j), -2.0 * w * e);
                    }
                }
            }

            let obs = &self.observations[t];
            for i in 0..d {
                let idx = self.h_index(t, i);
                let r = obs[i] - x[idx];
                value += r * r;
                if let Some(g) = grad.as_deref_mut() {
                    g[idx] -= 2.0 * r;
                }
                if let Some(h) = hess.as_deref_mut() {
                    h[(idx, idx)] += 2.0;
                }
            }
        }
        if let Some(h) = hess {
            symmetrize_from_upper(h);
        }
        value
    }
}

impl Objective for LdsProblem {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        2 * self.hidden_dim * self.hidden_dim + (self.horizon + 1) * self.hidden_dim
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

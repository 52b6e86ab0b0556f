//! Trust-region subproblem solver.
//!
//! Minimizes the model `M(d) = 1/2 d'Hd + g'd` over `|d| <= r` in three
//! stages:
//!
//! 1. Newton step: if a Cholesky factorization of `H` succeeds and
//!    `|H^{-1} g| <= r`, return it with `delta = 0`.
//! 2. Root search on the sign function `phi(delta)`: find a bracket by
//!    doubling/halving from a warm-start multiplier, then bisect until
//!    `phi = 0`, i.e. `H + delta I` is positive definite and
//!    `gamma2 r <= |d(delta)| <= r`.
//! 3. Hard case: when the search fails, shift by `-lambda_min`, solve in the
//!    complement of the minimal eigenspace and move along a minimal
//!    eigenvector to the boundary.
//!
//! `phi` is evaluated on a tridiagonal reduction `H = Q T Q'` computed once
//! per subproblem, so each evaluation costs `O(n)`: positive definiteness of
//! `T + delta I` is read off the pivots of its `LDL'` factorization.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen, SymmetricTridiagonal};
use thiserror::Error;

/// Maximum number of doubling/halving steps in [`find_bracket`].
pub const MAX_BRACKET_STEPS: usize = 100;
/// Maximum number of halvings in [`bisect`].
pub const MAX_BISECTION_STEPS: usize = 200;
/// Relative slack on the outer edge of the `phi = 0` window and on `|d| <= r`.
pub const BOUNDARY_SLACK: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrsError {
    #[error("invalid subproblem input: {0}")]
    InvalidInput(String),
    #[error("no sign change of phi after {steps} bracket steps from delta = {start}")]
    BracketFailure { start: f64, steps: usize },
    #[error("bisection on [{lo}, {hi}] never reached the acceptance window")]
    BisectionFailure { lo: f64, hi: f64 },
    #[error("hard-case solve reached with lambda_min = {lambda_min} >= 0")]
    InternalInconsistency { lambda_min: f64 },
    #[error("hard-case solve failed: {0}")]
    HardCase(String),
}

/// Data of one subproblem.
#[derive(Debug, Clone, Copy)]
pub struct SubproblemInputs<'a> {
    pub g: &'a DVector<f64>,
    pub h: &'a DMatrix<f64>,
    pub radius: f64,
    /// Inner edge of the acceptance window, as a fraction of `radius`.
    pub gamma2: f64,
}

impl<'a> SubproblemInputs<'a> {
    pub fn new(g: &'a DVector<f64>, h: &'a DMatrix<f64>, radius: f64, gamma2: f64) -> Self {
        Self {
            g,
            h,
            radius,
            gamma2,
        }
    }

    fn validate(&self) -> Result<(), TrsError> {
        let n = self.g.len();
        if n == 0 || self.h.nrows() != n || self.h.ncols() != n {
            return Err(TrsError::InvalidInput(format!(
                "g has length {n} but H is {}x{}",
                self.h.nrows(),
                self.h.ncols()
            )));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(TrsError::InvalidInput(format!("radius {} must be positive", self.radius)));
        }
        if !(self.gamma2 > 0.0 && self.gamma2 <= 1.0) {
            return Err(TrsError::InvalidInput(format!("gamma2 {} outside (0, 1]", self.gamma2)));
        }
        if self.g.iter().chain(self.h.iter()).any(|v| !v.is_finite()) {
            return Err(TrsError::InvalidInput("non-finite gradient or Hessian".into()));
        }
        Ok(())
    }
}

/// Which stage produced the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolvePath {
    Newton,
    Bisection,
    HardCase,
}

impl SolvePath {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Newton => "newton",
            Self::Bisection => "bisection",
            Self::HardCase => "hard_case",
        }
    }
}

/// Counters collected while solving.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveDiagnostics {
    pub phi_evaluations: usize,
    pub bracket_steps: usize,
    pub bisection_steps: usize,
    /// `phi` calls where `H + delta I` was singular or indefinite.
    pub indefinite_shifts: usize,
    /// Set when the root search failed and the hard-case solve took over.
    pub root_search_failed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSolution {
    pub d: DVector<f64>,
    pub delta: f64,
    pub path: SolvePath,
    /// `|g + (H + delta I) d|`.
    pub residual_stationarity: f64,
    pub norm_d: f64,
    pub diagnostics: SolveDiagnostics,
}

/// Value of `phi(delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phi {
    /// Indefinite shift or step longer than the radius.
    Negative = -1,
    /// Step inside the acceptance window.
    Zero = 0,
    /// Positive definite shift and step shorter than `gamma2 * r`.
    Positive = 1,
}

impl Phi {
    pub fn sign(self) -> i8 {
        self as i8
    }
}

/// `M(d) = 1/2 d'Hd + g'd`.
pub fn model_value(g: &DVector<f64>, h: &DMatrix<f64>, d: &DVector<f64>) -> f64 {
    0.5 * d.dot(&(h * d)) + g.dot(d)
}

/// `|g + (H + delta I) d|`, the stationarity residual of the shifted model.
pub fn stationarity_residual(g: &DVector<f64>, h: &DMatrix<f64>, d: &DVector<f64>, delta: f64) -> f64 {
    (h * d + d * delta + g).norm()
}

/// Newton step `-H^{-1} g` when `H` factors as positive definite and the step
/// fits in the ball.
pub fn try_newton_step(inputs: &SubproblemInputs<'_>) -> Option<DVector<f64>> {
    let chol = Cholesky::new(inputs.h.clone())?;
    let d = -chol.solve(inputs.g);
    if d.iter().all(|v| v.is_finite()) && d.norm() <= inputs.radius {
        Some(d)
    } else {
        None
    }
}

/// Tridiagonal reduction shared by all `phi` evaluations of one subproblem.
struct ShiftedSystem<'a> {
    inputs: SubproblemInputs<'a>,
    q: DMatrix<f64>,
    diag: DVector<f64>,
    off: DVector<f64>,
    /// `Q' g`.
    gt: DVector<f64>,
    diagnostics: SolveDiagnostics,
}

impl<'a> ShiftedSystem<'a> {
    fn new(inputs: SubproblemInputs<'a>) -> Self {
        let (q, diag, off) = SymmetricTridiagonal::new(inputs.h.clone()).unpack();
        let gt = q.tr_mul(inputs.g);
        Self {
            inputs,
            q,
            diag,
            off,
            gt,
            diagnostics: SolveDiagnostics::default(),
        }
    }

    /// Solve `(T + delta I) y = -Q'g`; `None` unless every `LDL'` pivot is
    /// positive.
    fn solve_reduced(&self, delta: f64) -> Option<DVector<f64>> {
        let n = self.diag.len();
        let mut pivots = Vec::with_capacity(n);
        let mut mult = Vec::with_capacity(n.saturating_sub(1));
        let mut z = DVector::zeros(n);
        let mut p = self.diag[0] + delta;
        if !(p > 0.0) {
            return None;
        }
        pivots.push(p);
        z[0] = -self.gt[0];
        for i in 1..n {
            let l = self.off[i - 1] / p;
            p = self.diag[i] + delta - l * self.off[i - 1];
            if !(p > 0.0) {
                return None;
            }
            mult.push(l);
            pivots.push(p);
            z[i] = -self.gt[i] - l * z[i - 1];
        }
        for i in 0..n {
            z[i] /= pivots[i];
        }
        for i in (0..n - 1).rev() {
            z[i] -= mult[i] * z[i + 1];
        }
        z.iter().all(|v| v.is_finite()).then_some(z)
    }

    fn phi(&mut self, delta: f64) -> Phi {
        self.diagnostics.phi_evaluations += 1;
        let Some(y) = self.solve_reduced(delta) else {
            self.diagnostics.indefinite_shifts += 1;
            return Phi::Negative;
        };
        classify(y.norm(), self.inputs.radius, self.inputs.gamma2)
    }

    fn step(&self, delta: f64) -> Option<DVector<f64>> {
        self.solve_reduced(delta).map(|y| &self.q * y)
    }

    fn find_bracket(&mut self, delta_start: f64) -> Result<(f64, f64), TrsError> {
        let start = delta_start.max(0.0);
        let phi_start = self.phi(start);
        if phi_start == Phi::Zero {
            return Ok((start, start));
        }
        let mut other = if start == 0.0 { 1.0 } else { 2.0 * start };
        for _ in 0..MAX_BRACKET_STEPS {
            self.diagnostics.bracket_steps += 1;
            let phi_other = self.phi(other);
            if phi_other.sign() * phi_start.sign() <= 0 {
                return Ok(if other < start { (other, start) } else { (start, other) });
            }
            match phi_other {
                Phi::Negative => other *= 2.0,
                Phi::Positive => other *= 0.5,
                Phi::Zero => unreachable!("handled by the sign test"),
            }
        }
        Err(TrsError::BracketFailure {
            start,
            steps: MAX_BRACKET_STEPS,
        })
    }

    fn bisect(&mut self, lo: f64, hi: f64) -> Result<f64, TrsError> {
        let (phi_lo, phi_hi) = (self.phi(lo), self.phi(hi));
        if phi_lo == Phi::Zero {
            return Ok(lo);
        }
        if phi_hi == Phi::Zero {
            return Ok(hi);
        }
        if phi_lo == phi_hi {
            return Err(TrsError::BisectionFailure { lo, hi });
        }
        // `neg` carries phi = -1, `pos` carries phi = +1.
        let (mut neg, mut pos) = if phi_lo == Phi::Negative { (lo, hi) } else { (hi, lo) };
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (neg + pos);
            if mid == neg || mid == pos {
                break;
            }
            self.diagnostics.bisection_steps += 1;
            match self.phi(mid) {
                Phi::Zero => return Ok(mid),
                Phi::Negative => neg = mid,
                Phi::Positive => pos = mid,
            }
        }
        Err(TrsError::BisectionFailure { lo, hi })
    }

    fn root_search(&mut self, delta_start: f64) -> Result<SubproblemSolution, TrsError> {
        let (lo, hi) = self.find_bracket(delta_start)?;
        let delta = self.bisect(lo, hi)?;
        let d = self
            .step(delta)
            .ok_or_else(|| TrsError::BisectionFailure { lo, hi })?;
        Ok(finish(&self.inputs, d, delta, SolvePath::Bisection, self.diagnostics))
    }
}

fn classify(norm: f64, radius: f64, gamma2: f64) -> Phi {
    if norm > radius * (1.0 + BOUNDARY_SLACK) {
        Phi::Negative
    } else if norm < gamma2 * radius {
        Phi::Positive
    } else {
        Phi::Zero
    }
}

fn finish(
    inputs: &SubproblemInputs<'_>,
    d: DVector<f64>,
    delta: f64,
    path: SolvePath,
    diagnostics: SolveDiagnostics,
) -> SubproblemSolution {
    SubproblemSolution {
        residual_stationarity: stationarity_residual(inputs.g, inputs.h, &d, delta),
        norm_d: d.norm(),
        d,
        delta,
        path,
        diagnostics,
    }
}

/// `phi(delta)` for a single multiplier.
///
/// `-1` when `H + delta I` is not positive definite (a singular shift counts
/// as indefinite) or `|d(delta)| > r`; `+1` when `|d(delta)| < gamma2 r`;
/// `0` otherwise, where `d(delta) = -(H + delta I)^{-1} g`.
pub fn phi(inputs: &SubproblemInputs<'_>, delta: f64) -> Result<Phi, TrsError> {
    inputs.validate()?;
    if !(delta >= 0.0) {
        return Err(TrsError::InvalidInput(format!("delta {delta} must be >= 0")));
    }
    Ok(ShiftedSystem::new(*inputs).phi(delta))
}

/// Interval `[lo, hi]` with `phi(lo) * phi(hi) <= 0`, searched from
/// `delta_start` by doubling while `phi < 0` and halving while `phi > 0`.
pub fn find_bracket(inputs: &SubproblemInputs<'_>, delta_start: f64) -> Result<(f64, f64), TrsError> {
    inputs.validate()?;
    ShiftedSystem::new(*inputs).find_bracket(delta_start)
}

/// Bisection on the sign of `phi` until `phi = 0`.
pub fn bisect(inputs: &SubproblemInputs<'_>, bracket: (f64, f64)) -> Result<f64, TrsError> {
    inputs.validate()?;
    ShiftedSystem::new(*inputs).bisect(bracket.0, bracket.1)
}

/// Hard-case step: `delta = -lambda_min`,
/// `d = -(H + delta I)^+ g + tau z` with `z` the first minimal eigenvector
/// (first significant entry made positive) and `tau >= 0` putting `d` on the
/// boundary.
///
/// A numerically singular positive semidefinite `H` (`lambda_min` within
/// rounding of zero) yields the minimum-norm interior step with `delta = 0`.
pub fn hard_case_solve(inputs: &SubproblemInputs<'_>) -> Result<SubproblemSolution, TrsError> {
    inputs.validate()?;
    hard_case_with(inputs, SolveDiagnostics::default())
}

fn hard_case_with(
    inputs: &SubproblemInputs<'_>,
    diagnostics: SolveDiagnostics,
) -> Result<SubproblemSolution, TrsError> {
    let eig = SymmetricEigen::new(inputs.h.clone());
    let scale = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
    let tol = 1e-12 * scale;
    let lambda_min = eig.eigenvalues.min();
    if lambda_min > tol {
        return Err(TrsError::InternalInconsistency { lambda_min });
    }
    let delta = (-lambda_min).max(0.0);
    let radius = inputs.radius;

    let in_min_space = |i: usize| eig.eigenvalues[i] <= lambda_min + tol;
    let n = inputs.g.len();
    let mut v = DVector::zeros(n);
    for i in (0..n).filter(|&i| !in_min_space(i)) {
        let q = eig.eigenvectors.column(i);
        let coeff = q.dot(inputs.g) / (eig.eigenvalues[i] + delta);
        v.axpy(-coeff, &q, 1.0);
    }
    let v_norm = v.norm();
    if v_norm > radius * (1.0 + BOUNDARY_SLACK) {
        return Err(TrsError::HardCase(format!(
            "range component has norm {v_norm} > radius {radius}"
        )));
    }
    if delta == 0.0 {
        return Ok(finish(inputs, v, 0.0, SolvePath::HardCase, diagnostics));
    }

    let first = (0..n)
        .find(|&i| in_min_space(i))
        .expect("minimal eigenvalue belongs to its own eigenspace");
    let mut z: DVector<f64> = eig.eigenvectors.column(first).into_owned();
    let zmax = z.amax();
    if let Some(lead) = z.iter().copied().find(|c| c.abs() > 1e-10 * zmax) {
        if lead < 0.0 {
            z.neg_mut();
        }
    }
    // |v + tau z| = r with tau >= 0.
    let vz = v.dot(&z);
    let disc = (vz * vz - v_norm * v_norm + radius * radius).max(0.0);
    let tau = -vz + disc.sqrt();
    let d = v + z * tau;
    Ok(finish(inputs, d, delta, SolvePath::HardCase, diagnostics))
}

/// Fallback once the root search on the tridiagonal form fails, which
/// happens in (or numerically near) the hard case, where `|d(delta)|` jumps
/// across the acceptance window between adjacent floating-point multipliers.
///
/// The secular equation is solved in the eigenbasis of `H`, parametrized by
/// the gap `t = delta + lambda_min` so that shifts just above the pole keep
/// full relative precision. A gradient with no weight on the minimal
/// eigenspace is the exact hard case and goes to [`hard_case_solve`].
fn eigen_fallback(
    inputs: &SubproblemInputs<'_>,
    diagnostics: SolveDiagnostics,
) -> Result<SubproblemSolution, TrsError> {
    let eig = SymmetricEigen::new(inputs.h.clone());
    let lambda_min = eig.eigenvalues.min();
    let scale = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
    let gaps = eig.eigenvalues.map(|l| (l - lambda_min).max(0.0));
    let gt = eig.eigenvectors.tr_mul(inputs.g);
    let min_weight = gt
        .iter()
        .zip(gaps.iter())
        .filter(|(_, &gap)| gap <= 1e-12 * scale)
        .map(|(c, _)| c * c)
        .sum::<f64>()
        .sqrt();
    let g_norm = inputs.g.norm();
    if lambda_min <= 1e-12 * scale && min_weight <= 1e-12 * g_norm {
        return hard_case_with(inputs, diagnostics);
    }

    let coeffs = |t: f64| DVector::from_fn(gt.len(), |i, _| -gt[i] / (gaps[i] + t));
    let norm_at = |t: f64| coeffs(t).norm();
    let (radius, gamma2) = (inputs.radius, inputs.gamma2);
    // delta >= 0 means t >= lambda_min; t > 0 keeps the shift definite.
    let t_floor = lambda_min.max(0.0);
    let mut lo = t_floor;
    let mut hi = if t_floor > 0.0 { 2.0 * t_floor } else { scale.max(g_norm / radius) };
    let mut steps = 0;
    while norm_at(hi) > radius {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps > MAX_BRACKET_STEPS || !hi.is_finite() {
            return Err(TrsError::BracketFailure {
                start: t_floor - lambda_min,
                steps,
            });
        }
    }
    let mut t = hi;
    for _ in 0..MAX_BISECTION_STEPS {
        if classify(norm_at(t), radius, gamma2) == Phi::Zero {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if norm_at(mid) > radius * (1.0 + BOUNDARY_SLACK) {
            lo = mid;
        } else {
            hi = mid;
        }
        t = hi;
    }
    let y = coeffs(t);
    let mut d = &eig.eigenvectors * &y;
    let delta = (t - lambda_min).max(0.0);
    let norm = d.norm();
    if norm < gamma2 * radius && delta > 0.0 {
        // The window fell between representable gaps; reach the boundary
        // along the minimal eigenvector as in the hard case.
        let imin = eig.eigenvalues.imin();
        let z = eig.eigenvectors.column(imin).into_owned();
        let dz = d.dot(&z);
        let disc = (dz * dz - norm * norm + radius * radius).max(0.0);
        let tau = if dz >= 0.0 { -dz + disc.sqrt() } else { -dz - disc.sqrt() };
        d.axpy(tau, &z, 1.0);
    }
    Ok(finish(inputs, d, delta, SolvePath::HardCase, diagnostics))
}

/// Solve from a cold start (`delta = 0`).
pub fn solve_trs(inputs: &SubproblemInputs<'_>) -> Result<SubproblemSolution, TrsError> {
    solve_trs_from(inputs, 0.0)
}

/// Solve with the bracket search warm-started at `delta_start`, normally the
/// multiplier of the previous outer iteration.
pub fn solve_trs_from(
    inputs: &SubproblemInputs<'_>,
    delta_start: f64,
) -> Result<SubproblemSolution, TrsError> {
    inputs.validate()?;
    if let Some(d) = try_newton_step(inputs) {
        return Ok(finish(inputs, d, 0.0, SolvePath::Newton, SolveDiagnostics::default()));
    }
    let start = if delta_start.is_finite() { delta_start.max(0.0) } else { 0.0 };
    let mut system = ShiftedSystem::new(*inputs);
    match system.root_search(start) {
        Ok(sol) => Ok(sol),
        Err(_) => {
            let mut diagnostics = system.diagnostics;
            diagnostics.root_search_failed = true;
            eigen_fallback(inputs, diagnostics)
        }
    }
}

/// Trust-region parameters that enter the subproblem certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

impl CertificateParams {
    /// `gamma1 = 0, gamma2 = 1, gamma3 = 1`.
    pub const EXACT: Self = Self {
        gamma1: 0.0,
        gamma2: 1.0,
        gamma3: 1.0,
    };
}

/// Outcome of checking the inexact optimality conditions.
///
/// * stationarity: `|g + (H + delta I) d| <= gamma1 |grad f(x + d)| + tol`
/// * complementarity: `gamma2 delta r <= delta |d| + tol`
/// * feasibility: `|d| <= r (1 + 1e-12)`
/// * decrease: `M(d) <= -gamma3 (delta / 2) |d|^2 + tol`
///
/// with `tol = 1e-10 (1 + |g|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateReport {
    pub stationarity: bool,
    pub complementarity: bool,
    pub feasibility: bool,
    pub decrease: bool,
    pub stationarity_residual: f64,
    pub complementarity_gap: f64,
    pub model_value: f64,
    pub abs_tol: f64,
    gamma1_bound: f64,
    g_norm: f64,
    /// `|g| + (|H|_F + delta) |d|`, the size of the terms in the residual.
    term_scale: f64,
    d_norm: f64,
    /// `M(d) + gamma3 (delta / 2) |d|^2`.
    decrease_margin: f64,
}

/// Absolute tolerance on the stationarity residual in the residual form of
/// the certificate, relative to `1 + |g|`.
pub const RESIDUAL_FORM_TOL: f64 = 1e-8;

/// Relative backward error allowed in the residual form. Rounding in
/// `(H + delta I) d` alone is of order `eps |H| |d|`, which for long steps
/// exceeds any fixed absolute tolerance.
pub const BACKWARD_TOL: f64 = 1e-12;

impl CertificateReport {
    pub fn all(&self) -> bool {
        self.stationarity && self.complementarity && self.feasibility && self.decrease
    }

    /// Stationarity judged with `RESIDUAL_FORM_TOL (1 + |g|)` plus a
    /// backward-error allowance `BACKWARD_TOL (|g| + (|H|_F + delta) |d|)`;
    /// decrease gets the same allowance times `|d|`. Complementarity and
    /// feasibility are unchanged.
    pub fn all_residual_form(&self) -> bool {
        let backward = BACKWARD_TOL * self.term_scale;
        let stationarity = self.stationarity_residual
            <= self.gamma1_bound + RESIDUAL_FORM_TOL * (1.0 + self.g_norm) + backward;
        let decrease = self.decrease || self.decrease_margin <= self.abs_tol + backward * self.d_norm;
        stationarity && self.complementarity && self.feasibility && decrease
    }
}

pub fn check_conditions(
    g: &DVector<f64>,
    h: &DMatrix<f64>,
    d: &DVector<f64>,
    delta: f64,
    radius: f64,
    grad_trial_norm: f64,
    params: CertificateParams,
) -> CertificateReport {
    let g_norm = g.norm();
    let abs_tol = 1e-10 * (1.0 + g_norm);
    let d_norm = d.norm();
    let residual = stationarity_residual(g, h, d, delta);
    // With gamma1 = 0 the trial gradient plays no role, even when non-finite.
    let gamma1_bound = if params.gamma1 > 0.0 {
        params.gamma1 * grad_trial_norm
    } else {
        0.0
    };
    let m = model_value(g, h, d);
    let decrease_margin = m + params.gamma3 * 0.5 * delta * d_norm * d_norm;
    CertificateReport {
        stationarity: residual <= gamma1_bound + abs_tol,
        complementarity: params.gamma2 * delta * radius <= delta * d_norm + abs_tol,
        feasibility: d_norm <= radius * (1.0 + 1e-12),
        decrease: decrease_margin <= abs_tol,
        stationarity_residual: residual,
        complementarity_gap: params.gamma2 * delta * radius - delta * d_norm,
        model_value: m,
        abs_tol,
        gamma1_bound,
        g_norm,
        term_scale: g_norm + (h.norm() + delta.abs()) * d_norm,
        d_norm,
        decrease_margin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    fn diag(xs: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&v(xs))
    }

    #[test]
    fn newton_step_examples() {
        let h = DMatrix::identity(2, 2);
        let g = v(&[0.2, 0.0]);
        let d = try_newton_step(&SubproblemInputs::new(&g, &h, 1.0, 0.8)).unwrap();
        assert_eq!(d, v(&[-0.2, 0.0]));

        let g = v(&[1.0, 0.0]);
        assert!(try_newton_step(&SubproblemInputs::new(&g, &h, 0.5, 0.8)).is_none());

        let h = diag(&[-1.0, 2.0]);
        for g in [v(&[1.0, 1.0]), v(&[0.0, 0.0]), v(&[1e-3, -4.0])] {
            for r in [0.1, 1.0, 100.0] {
                assert!(try_newton_step(&SubproblemInputs::new(&g, &h, r, 0.8)).is_none());
            }
        }
    }

    #[test]
    fn phi_examples() {
        let h = DMatrix::identity(2, 2);
        let g = v(&[1.0, 0.0]);
        let inp = SubproblemInputs::new(&g, &h, 0.5, 0.8);
        assert_eq!(phi(&inp, 0.0).unwrap(), Phi::Negative);
        assert_eq!(phi(&inp, 1.0).unwrap(), Phi::Zero);
        assert_eq!(phi(&inp, 4.0).unwrap(), Phi::Positive);
        assert!(phi(&inp, -1.0).is_err());
    }

    #[test]
    fn phi_singular_shift_is_negative() {
        // H + 1 I = diag(0, 3) is singular with g having a component in its kernel.
        let h = diag(&[-1.0, 2.0]);
        let g = v(&[1.0, 1.0]);
        assert_eq!(phi(&SubproblemInputs::new(&g, &h, 1.0, 0.8), 1.0).unwrap(), Phi::Negative);
    }

    #[test]
    fn bracket_straddles_root() {
        let h = DMatrix::identity(2, 2);
        let g = v(&[1.0, 0.0]);
        let inp = SubproblemInputs::new(&g, &h, 0.5, 0.8);
        // Doubling from delta' = 1: phi(1) = 0 already.
        let (lo, hi) = find_bracket(&inp, 0.0).unwrap();
        assert_eq!((lo, hi), (0.0, 1.0));
        let pl = phi(&inp, lo).unwrap().sign();
        let ph = phi(&inp, hi).unwrap().sign();
        assert!(pl * ph <= 0);
        assert_eq!(find_bracket(&inp, 1.0).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn bracket_from_warm_start_above_root() {
        let h = DMatrix::identity(2, 2);
        let g = v(&[1.0, 0.0]);
        let inp = SubproblemInputs::new(&g, &h, 0.5, 0.8);
        // phi(10) = +1, 20 -> +1, halve to 10, 5, 2.5, 1.25 (|d| = 0.444, window).
        let (lo, hi) = find_bracket(&inp, 10.0).unwrap();
        assert_eq!((lo, hi), (1.25, 10.0));
    }

    #[test]
    fn bisection_examples() {
        let h = DMatrix::identity(2, 2);
        let g = v(&[1.0, 0.0]);
        let inp = SubproblemInputs::new(&g, &h, 0.5, 0.8);
        let delta = bisect(&inp, (0.0, 16.0)).unwrap();
        let norm = 1.0 / (1.0 + delta);
        assert!((0.4..=0.5).contains(&norm), "{delta}");
        assert_eq!(bisect(&inp, (1.0, 1.0)).unwrap(), 1.0);

        // Eigenbasis secular equation: |d|^2 = 1/(2+delta)^2 + 1/(3+delta)^2.
        let h = diag(&[2.0, 3.0]);
        let g = v(&[1.0, 1.0]);
        let inp = SubproblemInputs::new(&g, &h, 0.1, 0.8);
        let (lo, hi) = find_bracket(&inp, 0.0).unwrap();
        let delta = bisect(&inp, (lo, hi)).unwrap();
        let norm = ((2.0 + delta).powi(-2) + (3.0 + delta).powi(-2)).sqrt();
        assert!((0.08..=0.1).contains(&norm), "{norm}");
    }

    #[test]
    fn hard_case_examples() {
        let h = diag(&[-1.0, 2.0]);
        let g = v(&[0.0, -3.0]);
        let sol = hard_case_solve(&SubproblemInputs::new(&g, &h, 2.0, 0.8)).unwrap();
        assert_eq!(sol.path, SolvePath::HardCase);
        assert_relative_eq!(sol.delta, 1.0, epsilon = 1e-14);
        assert_relative_eq!(sol.d[0], 3f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(sol.d[1], 1.0, epsilon = 1e-12);
        assert_relative_eq!(sol.norm_d, 2.0, max_relative = 1e-10);

        let g = v(&[0.0, 0.0]);
        let sol = hard_case_solve(&SubproblemInputs::new(&g, &h, 1.0, 0.8)).unwrap();
        assert_relative_eq!(sol.d[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(sol.d[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn hard_case_rejects_positive_definite() {
        let h = DMatrix::identity(2, 2);
        let g = v(&[1.0, 0.0]);
        assert!(matches!(
            hard_case_solve(&SubproblemInputs::new(&g, &h, 0.5, 0.8)),
            Err(TrsError::InternalInconsistency { .. })
        ));
    }

    #[test]
    fn solve_examples() {
        let h = DMatrix::identity(2, 2);
        let g = v(&[1.0, 0.0]);
        // Exact window: the boundary solution is forced.
        let sol = solve_trs(&SubproblemInputs::new(&g, &h, 0.5, 1.0)).unwrap();
        assert_eq!(sol.path, SolvePath::Bisection);
        assert_relative_eq!(sol.delta, 1.0, max_relative = 1e-12);
        assert_relative_eq!(sol.d[0], -0.5, max_relative = 1e-12);

        let g = v(&[0.2, 0.0]);
        let sol = solve_trs(&SubproblemInputs::new(&g, &h, 1.0, 0.8)).unwrap();
        assert_eq!(sol.path, SolvePath::Newton);
        assert_eq!(sol.delta, 0.0);
        assert_eq!(sol.d, v(&[-0.2, 0.0]));

        let h = diag(&[-1.0, 2.0]);
        let g = v(&[0.0, -3.0]);
        let sol = solve_trs(&SubproblemInputs::new(&g, &h, 2.0, 0.8)).unwrap();
        assert_eq!(sol.path, SolvePath::HardCase);
        assert!(sol.diagnostics.root_search_failed);
        assert_relative_eq!(sol.delta, 1.0, epsilon = 1e-14);
        assert_relative_eq!(sol.d[0], 3f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(sol.d[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        let h = DMatrix::identity(2, 2);
        let g = v(&[1.0, 0.0]);
        assert!(solve_trs(&SubproblemInputs::new(&g, &h, 0.0, 0.8)).is_err());
        assert!(solve_trs(&SubproblemInputs::new(&g, &h, 1.0, 0.0)).is_err());
        let g3 = v(&[1.0, 0.0, 0.0]);
        assert!(solve_trs(&SubproblemInputs::new(&g3, &h, 1.0, 0.8)).is_err());
        let gn = v(&[f64::NAN, 0.0]);
        assert!(solve_trs(&SubproblemInputs::new(&gn, &h, 1.0, 0.8)).is_err());
    }

    #[test]
    fn certificate_examples() {
        let h = DMatrix::identity(2, 2);
        let g = v(&[1.0, 0.0]);
        let rep = check_conditions(&g, &h, &v(&[-0.5, 0.0]), 1.0, 0.5, 0.0, CertificateParams::EXACT);
        assert!(rep.all(), "{rep:?}");

        let rep = check_conditions(&g, &h, &v(&[0.0, 0.0]), 0.0, 0.5, 0.0, CertificateParams::EXACT);
        assert!(!rep.stationarity);
        assert!(rep.complementarity && rep.feasibility && rep.decrease);

        // Interior Newton step: delta = 0 makes complementarity 0 <= 0.
        let g = v(&[0.2, 0.0]);
        let rep = check_conditions(&g, &h, &v(&[-0.2, 0.0]), 0.0, 1.0, 0.0, CertificateParams::EXACT);
        assert_eq!(rep.complementarity_gap, 0.0);
        assert!(rep.all());
    }

    #[test]
    fn model_value_examples() {
        let h = DMatrix::identity(2, 2);
        assert_eq!(model_value(&v(&[1.0, 0.0]), &h, &v(&[-0.5, 0.0])), -0.375);
        assert_eq!(model_value(&v(&[1.0, 0.0]), &h, &v(&[0.0, 0.0])), 0.0);
        let m = model_value(&v(&[0.0, -3.0]), &diag(&[-1.0, 2.0]), &v(&[3f64.sqrt(), 1.0]));
        assert_relative_eq!(m, -3.5, epsilon = 1e-14);
    }

    #[test]
    fn near_hard_case_keeps_small_eigen_component() {
        // The window [r, r(1 + 1e-13)] is narrower than one ulp of delta here.
        let g = v(&[1e-9, 1.0]);
        let h = diag(&[-1.0, 2.0]);
        let sol = solve_trs(&SubproblemInputs::new(&g, &h, 10.0, 1.0)).unwrap();
        assert_relative_eq!(sol.norm_d, 10.0, max_relative = 1e-12);
        assert!(sol.residual_stationarity < 1e-8, "{}", sol.residual_stationarity);
        assert!(sol.d[0] < 0.0);
        let exact = -0.5 * 100.0 + 0.5 * (1.0 / 9.0) * 3.0 - 1.0 / 3.0;
        assert_relative_eq!(model_value(&g, &h, &sol.d), exact, max_relative = 1e-8);
    }

    /// Rotated `diag(eigs)` with a fixed Householder reflection.
    fn rotated(eigs: &[f64]) -> DMatrix<f64> {
        let n = eigs.len();
        let u = DVector::from_fn(n, |i, _| 1.0 + i as f64);
        let q = DMatrix::identity(n, n) - &u * u.transpose() * (2.0 / u.norm_squared());
        &q * diag(eigs) * q.transpose()
    }

    #[test]
    fn long_steps_are_certified_up_to_rounding() {
        // Small gradient, huge radius, slightly indefinite H: |d| ~ 2e6 and
        // rounding in (H + delta I) d is ~1e-7, far above 1e-8 (1 + |g|).
        let h = rotated(&[968.86, 847.70, 30.88, -0.0683596]);
        let g = v(&[0.2, -0.1, 0.25, 0.05]);
        let r = 2_097_152.0;
        let sol = solve_trs(&SubproblemInputs::new(&g, &h, r, 0.8)).unwrap();
        let rep = check_conditions(&g, &h, &sol.d, sol.delta, r, 0.0, CertificateParams { gamma1: 0.0, gamma2: 0.8, gamma3: 1.0 });
        assert!(rep.all_residual_form(), "{rep:?}");
        assert!(rep.stationarity_residual <= BACKWARD_TOL * (g.norm() + (h.norm() + sol.delta) * sol.norm_d));
    }

    #[test]
    fn backward_allowance_still_rejects_wrong_steps() {
        let h = rotated(&[4.0, 2.0, 1.0, -0.5]);
        let g = v(&[1.0, -2.0, 0.5, 0.3]);
        let sol = solve_trs(&SubproblemInputs::new(&g, &h, 3.0, 0.8)).unwrap();
        let params = CertificateParams { gamma1: 0.0, gamma2: 0.8, gamma3: 1.0 };
        assert!(check_conditions(&g, &h, &sol.d, sol.delta, 3.0, 0.0, params).all_residual_form());
        let mut bent = sol.d.clone();
        bent[0] += 1e-6;
        assert!(!check_conditions(&g, &h, &bent, sol.delta, 3.0, 0.0, params).all_residual_form());
    }
}

//! Outer trust-region loop shared by CAT and the classic baseline.
//!
//! The two methods differ only in how they score a trial step, whether they
//! accept it and how they pick the next radius; everything else (model,
//! subproblem solve, evaluation caching, termination) lives here.

use nalgebra::{DMatrix, DVector};

use crate::problem::{Objective, Point};
use crate::trace::{IterationRecord, MinimizeOutcome, TerminationStatus};
use crate::trs::{check_conditions, model_value, solve_trs_from, CertificateParams, SolvePath, SubproblemInputs};

/// Consecutive non-finite trial evaluations tolerated before giving up.
pub const MAX_NONFINITE_TRIALS: usize = 50;

pub(crate) trait StepPolicy {
    fn eps(&self) -> f64;
    fn max_iter(&self) -> usize;
    fn initial_radius(&self) -> f64;
    fn certificate(&self) -> CertificateParams;
    fn ratio(&self, f_k: f64, f_trial: f64, m_val: f64, grad_trial_norm: f64, d_norm: f64) -> f64;
    fn accept(&self, ratio: f64, f_k: f64, f_trial: f64) -> bool;
    fn next_radius(&self, ratio: f64, radius: f64, d_norm: f64) -> f64;
}

/// Iterate, radius, warm-start multiplier and cached evaluations.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub k: usize,
    pub x: DVector<f64>,
    pub r: f64,
    pub delta_warm: f64,
    pub f_x: f64,
    pub g_x: DVector<f64>,
    /// Hessian at `x`; `None` until first needed after a move.
    pub h_x: Option<DMatrix<f64>>,
    pub fevals: usize,
    pub gevals: usize,
    pub hevals: usize,
    nonfinite_trials: usize,
}

impl SolverState {
    /// Evaluates `f` and `grad f` at `x1`; `k` starts at 1.
    pub fn new<P: Objective + ?Sized>(p: &P, x1: &Point, r1: f64) -> Self {
        let x = x1.as_vector().clone();
        let (f_x, g_x) = p.value_and_gradient(&x);
        Self {
            k: 1,
            x,
            r: r1,
            delta_warm: 0.0,
            f_x,
            g_x,
            h_x: None,
            fevals: 1,
            gevals: 1,
            hevals: 0,
            nonfinite_trials: 0,
        }
    }

    fn counters(&self) -> (usize, usize, usize) {
        (self.fevals, self.gevals, self.hevals)
    }
}

pub(crate) fn step_with<P, S>(
    state: &mut SolverState,
    p: &P,
    policy: &S,
) -> (Option<IterationRecord>, Option<TerminationStatus>)
where
    P: Objective + ?Sized,
    S: StepPolicy + ?Sized,
{
    if !(state.f_x.is_finite() && state.g_x.iter().all(|v| v.is_finite())) {
        return (
            None,
            Some(TerminationStatus::NumericalFailure("non-finite value or gradient at the iterate".into())),
        );
    }
    if state.h_x.is_none() {
        state.h_x = Some(p.hessian(&state.x));
        state.hevals += 1;
    }
    let h = state.h_x.as_ref().expect("just filled");
    let cert = policy.certificate();
    let inputs = SubproblemInputs::new(&state.g_x, h, state.r, cert.gamma2);
    let sol = match solve_trs_from(&inputs, state.delta_warm) {
        Ok(sol) => sol,
        Err(e) => return (None, Some(TerminationStatus::NumericalFailure(format!("subproblem: {e}")))),
    };

    let trial = &state.x + &sol.d;
    let (f_trial, g_trial) = p.value_and_gradient(&trial);
    state.fevals += 1;
    state.gevals += 1;
    let grad_trial_norm = g_trial.norm();
    let m_val = model_value(&state.g_x, h, &sol.d);
    let d_norm = sol.norm_d;
    let finite_trial = f_trial.is_finite() && grad_trial_norm.is_finite();

    let (ratio, accepted) = if finite_trial {
        let ratio = policy.ratio(state.f_x, f_trial, m_val, grad_trial_norm, d_norm);
        (ratio, policy.accept(ratio, state.f_x, f_trial))
    } else {
        (f64::NEG_INFINITY, false)
    };
    let r_next = policy.next_radius(ratio, state.r, d_norm);
    let certificate = check_conditions(&state.g_x, h, &sol.d, sol.delta, state.r, grad_trial_norm, cert);
    let segment_lipschitz = if finite_trial {
        p.hessian_lipschitz_on_segment(&state.x, &trial)
    } else {
        None
    };

    let (fevals, gevals, hevals) = state.counters();
    let record = IterationRecord {
        k: state.k,
        f: state.f_x,
        grad_norm: state.g_x.norm(),
        r: state.r,
        d_norm,
        delta: sol.delta,
        rho_hat: ratio,
        accepted,
        grad_trial_norm,
        f_trial,
        model_value: m_val,
        r_next,
        path: sol.path,
        certificate_ok: certificate.all_residual_form(),
        segment_lipschitz,
        fevals,
        gevals,
        hevals,
    };

    if finite_trial && grad_trial_norm <= policy.eps() {
        let k = state.k;
        let x = Point::new(trial).expect("finite trial point");
        return (Some(record), Some(TerminationStatus::Converged { x, k }));
    }

    if finite_trial {
        state.nonfinite_trials = 0;
    } else {
        state.nonfinite_trials += 1;
        if state.nonfinite_trials >= MAX_NONFINITE_TRIALS {
            return (
                Some(record),
                Some(TerminationStatus::NumericalFailure(format!(
                    "{MAX_NONFINITE_TRIALS} consecutive non-finite trial evaluations"
                ))),
            );
        }
    }
    if !(r_next > 0.0 && r_next.is_finite()) {
        let reason = if d_norm == 0.0 && sol.path != SolvePath::HardCase {
            "zero step away from a stationary point".to_string()
        } else {
            format!("radius update produced {r_next}")
        };
        return (Some(record), Some(TerminationStatus::NumericalFailure(reason)));
    }

    if accepted {
        state.x = trial;
        state.f_x = f_trial;
        state.g_x = g_trial;
        state.h_x = None;
    }
    state.r = r_next;
    state.delta_warm = sol.delta;
    state.k += 1;
    (Some(record), None)
}

pub(crate) fn run<P, S>(p: &P, x1: &Point, policy: &S) -> MinimizeOutcome
where
    P: Objective + ?Sized,
    S: StepPolicy + ?Sized,
{
    let mut state = SolverState::new(p, x1, policy.initial_radius());
    let mut trace = Vec::new();
    let mut iterates = vec![state.x.clone()];
    for _ in 0..policy.max_iter() {
        let (record, status) = step_with(&mut state, p, policy);
        let accepted = record.as_ref().is_some_and(|r| r.accepted);
        if let Some(record) = record {
            trace.push(record);
        }
        match status {
            Some(TerminationStatus::Converged { x, k }) => {
                let (f_final, g_final) = p.value_and_gradient(x.as_vector());
                iterates.push(x.as_vector().clone());
                return MinimizeOutcome {
                    x_final: x.as_vector().clone(),
                    f_final,
                    grad_norm_final: g_final.norm(),
                    status: TerminationStatus::Converged { x, k },
                    trace,
                    iterates,
                    fevals: state.fevals,
                    gevals: state.gevals,
                    hevals: state.hevals,
                };
            }
            Some(status) => return finish(state, status, trace, iterates),
            None => {
                if accepted {
                    iterates.push(state.x.clone());
                }
            }
        }
    }
    finish(state, TerminationStatus::IterationLimit, trace, iterates)
}

fn finish(
    state: SolverState,
    status: TerminationStatus,
    trace: Vec<IterationRecord>,
    iterates: Vec<DVector<f64>>,
) -> MinimizeOutcome {
    MinimizeOutcome {
        grad_norm_final: state.g_x.norm(),
        f_final: state.f_x,
        x_final: state.x,
        status,
        trace,
        iterates,
        fevals: state.fevals,
        gevals: state.gevals,
        hevals: state.hevals,
    }
}

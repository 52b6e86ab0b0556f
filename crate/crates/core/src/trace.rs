//! Per-iteration records, run outcomes and the trace CSV format.

use std::fmt;
use std::io::{self, Write};

use nalgebra::DVector;

use crate::problem::Point;
use crate::trs::SolvePath;

/// Column order of [`write_trace_csv`].
pub const TRACE_COLUMNS: [&str; 11] = [
    "k", "f", "grad_norm", "r", "d_norm", "delta", "rho_hat", "accepted", "fevals", "gevals", "hevals",
];

/// One outer iteration. `f`, `grad_norm` and `r` describe the iterate the
/// step was computed from; counters are cumulative after the trial
/// evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub r: f64,
    pub d_norm: f64,
    pub delta: f64,
    /// Acceptance ratio of the method that produced the trace.
    pub rho_hat: f64,
    pub accepted: bool,
    pub grad_trial_norm: f64,
    pub f_trial: f64,
    pub model_value: f64,
    pub r_next: f64,
    pub path: SolvePath,
    /// Subproblem certificate in residual form with the run's parameters.
    pub certificate_ok: bool,
    pub segment_lipschitz: Option<f64>,
    pub fevals: usize,
    pub gevals: usize,
    pub hevals: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TerminationStatus {
    Converged { x: Point, k: usize },
    IterationLimit,
    NumericalFailure(String),
}

impl TerminationStatus {
    pub fn is_converged(&self) -> bool {
        matches!(self, Self::Converged { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Converged { .. } => "converged",
            Self::IterationLimit => "iteration_limit",
            Self::NumericalFailure(_) => "numerical_failure",
        }
    }
}

impl fmt::Display for TerminationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Converged { k, .. } => write!(f, "converged at iteration {k}"),
            Self::IterationLimit => f.write_str("iteration limit reached"),
            Self::NumericalFailure(reason) => write!(f, "numerical failure: {reason}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeOutcome {
    pub status: TerminationStatus,
    pub trace: Vec<IterationRecord>,
    /// Start point, every accepted iterate, and the converged trial point.
    pub iterates: Vec<DVector<f64>>,
    pub x_final: DVector<f64>,
    pub f_final: f64,
    /// Gradient norm at `x_final`, re-evaluated after convergence.
    pub grad_norm_final: f64,
    pub fevals: usize,
    pub gevals: usize,
    pub hevals: usize,
}

impl MinimizeOutcome {
    /// Iterations performed.
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write the trace as CSV with the header [`TRACE_COLUMNS`]; reals carry 17
/// significant digits.
pub fn write_trace_csv<W: Write>(trace: &[IterationRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{}", TRACE_COLUMNS.join(","))?;
    for r in trace {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.k,
            real(r.f),
            real(r.grad_norm),
            real(r.r),
            real(r.d_norm),
            real(r.delta),
            real(r.rho_hat),
            r.accepted,
            r.fevals,
            r.gevals,
            r.hevals
        )?;
    }
    Ok(())
}

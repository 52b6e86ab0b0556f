//! Running a suite and the per-run record format.

use std::collections::BTreeSet;
use std::io;
use std::path::Path;
use std::time::Instant;

use cat_core::classic::{cat_theta_ablation, classic_minimize};
use cat_core::problem::CorpusEntry;
use cat_core::{minimize, MinimizeOutcome, TerminationStatus};
use serde::{Deserialize, Serialize};

use crate::config::{SolverSpec, SuiteSpec};
use crate::BenchError;

/// Outcome category of one run, as written to `records.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    IterationLimit,
    NumericalFailure,
}

impl RunStatus {
    pub fn from_termination(t: &TerminationStatus) -> Self {
        match t {
            TerminationStatus::Converged { .. } => Self::Converged,
            TerminationStatus::IterationLimit => Self::IterationLimit,
            TerminationStatus::NumericalFailure(_) => Self::NumericalFailure,
        }
    }
}

/// One (problem, solver) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub problem: String,
    pub solver: String,
    pub status: RunStatus,
    pub iters: usize,
    pub fevals: usize,
    pub gevals: usize,
    pub hevals: usize,
    pub final_grad_norm: f64,
    pub f_final: f64,
    /// `f(x_final) - f*` when the problem registers `f*`.
    pub gap: Option<f64>,
    /// Iteration cap the run was given.
    pub max_iter: usize,
    pub wall_time_seconds: f64,
}

impl BenchmarkRecord {
    pub fn converged(&self) -> bool {
        self.status == RunStatus::Converged
    }

    /// Same record with the wall time zeroed, for reproducibility checks.
    pub fn without_time(&self) -> Self {
        Self {
            wall_time_seconds: 0.0,
            ..self.clone()
        }
    }
}

/// Run one configured solver on a built problem.
pub fn run_solver(entry: &CorpusEntry, solver: &SolverSpec) -> Result<MinimizeOutcome, BenchError> {
    let res = match solver {
        SolverSpec::Cat(cfg) => minimize(&entry.problem, &entry.start, cfg),
        SolverSpec::CatTheta0(cfg) => cat_theta_ablation(&entry.problem, &entry.start, cfg),
        SolverSpec::Classic(cfg) => classic_minimize(&entry.problem, &entry.start, cfg),
    };
    res.map_err(|e| BenchError::Config(format!("{} on {}: {e}", solver.name(), entry.name)))
}

fn record(entry: &CorpusEntry, solver: &SolverSpec, cap: usize, out: &MinimizeOutcome, secs: f64) -> BenchmarkRecord {
    let status = RunStatus::from_termination(&out.status);
    BenchmarkRecord {
        problem: entry.name.clone(),
        solver: solver.name().to_string(),
        status,
        iters: out.iterations(),
        fevals: out.fevals,
        gevals: out.gevals,
        hevals: out.hevals,
        final_grad_norm: out.grad_norm_final,
        f_final: out.f_final,
        gap: entry.f_star.map(|f| out.f_final - f),
        max_iter: cap,
        wall_time_seconds: secs,
    }
}

/// Run every (problem, solver) pair, serially. Records are sorted by problem
/// name, then solver name. Numerical failures are recorded, not raised.
pub fn run_suite(spec: &SuiteSpec) -> Result<Vec<BenchmarkRecord>, BenchError> {
    run_suite_with(spec, |_, _| {})
}

/// [`run_suite`] with a callback receiving each record and its full outcome
/// as soon as the run finishes.
pub fn run_suite_with<F>(spec: &SuiteSpec, mut observe: F) -> Result<Vec<BenchmarkRecord>, BenchError>
where
    F: FnMut(&BenchmarkRecord, &MinimizeOutcome),
{
    spec.validate()?;
    let mut names = BTreeSet::new();
    let mut records = Vec::with_capacity(spec.problems.len() * spec.solvers.len());
    for item in &spec.problems {
        let entry = item.spec.build().map_err(|e| BenchError::Config(e.to_string()))?;
        if !names.insert(entry.name.clone()) {
            return Err(BenchError::Config(format!("problem `{}` listed twice", entry.name)));
        }
        let cap = spec.cap_for(item);
        for solver in &spec.solvers {
            let solver = solver.with_max_iter(cap);
            let start = Instant::now();
            let out = run_solver(&entry, &solver)?;
            let rec = record(&entry, &solver, cap, &out, start.elapsed().as_secs_f64());
            observe(&rec, &out);
            records.push(rec);
        }
    }
    records.sort_by(|a, b| (&a.problem, &a.solver).cmp(&(&b.problem, &b.solver)));
    Ok(records)
}

pub fn write_records_csv<W: io::Write>(records: &[BenchmarkRecord], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv<R: io::Read>(input: R) -> Result<Vec<BenchmarkRecord>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn read_records_file(path: &Path) -> Result<Vec<BenchmarkRecord>, BenchError> {
    let file = std::fs::File::open(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_records_csv(file).map_err(|source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

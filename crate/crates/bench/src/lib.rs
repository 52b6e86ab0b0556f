//! Benchmark harness for the CAT trust-region method.
//!
//! A [`SuiteSpec`] names problems and solvers; [`run_suite`] produces one
//! [`BenchmarkRecord`] per pair; [`stats`] turns records into geometric
//! means and performance profiles; [`emit_reports`] writes them to disk.
//!
//! File formats:
//!
//! * `records.csv`: `problem,solver,status,iters,fevals,gevals,hevals,`
//!   `final_grad_norm,f_final,gap,max_iter,wall_time_seconds`; `status` is
//!   `converged`, `iteration_limit` or `numerical_failure`; `gap` is empty
//!   when the problem has no registered optimal value.
//! * `summary.csv`: `solver,problems,failures,gmean_iters,gmean_fevals,gmean_gevals`.
//!   Non-converged runs contribute their iteration cap to every mean.
//! * `profile_<solver>.csv`: `t,fraction`, the fraction of problems solved
//!   within `t` iterations.

use std::path::PathBuf;

use thiserror::Error;

pub mod config;
pub mod report;
pub mod runner;
pub mod stats;

pub use config::{build_suite, load_suite, Overrides, ProblemItem, SolverKind, SolverSpec, SuiteSpec};
pub use report::emit_reports;
pub use runner::{read_records_csv, run_suite, BenchmarkRecord, RunStatus};
pub use stats::{geometric_mean_iters, performance_profile, summarize};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("statistics error: {0}")]
    Stats(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

impl BenchError {
    /// Process exit code: 2 for configuration problems, 3 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Stats(_) => 2,
            Self::Io { .. } | Self::Csv { .. } => 3,
        }
    }
}

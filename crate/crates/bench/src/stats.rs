//! Statistics over benchmark records: geometric means with failure
//! substitution and fraction-solved performance profiles.
//!
//! Everything here is a pure function of the record list.

use std::collections::{BTreeMap, BTreeSet};

use crate::runner::BenchmarkRecord;
use crate::BenchError;

/// `exp(mean(ln v))`. Values are sorted first so the result does not depend
/// on input order.
pub fn geometric_mean(values: &[f64]) -> Result<f64, BenchError> {
    if values.is_empty() {
        return Err(BenchError::Stats("geometric mean of an empty list".into()));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(BenchError::Stats(format!("geometric mean needs positive values, got {v}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    // exp(ln v) is not always v; a constant list should return its value exactly.
    if sorted[0] == sorted[sorted.len() - 1] {
        return Ok(sorted[0]);
    }
    let log_sum: f64 = sorted.iter().map(|v| v.ln()).sum();
    Ok((log_sum / sorted.len() as f64).exp())
}

/// Geometric mean of iteration counts with `cap` in place of every
/// non-converged run.
pub fn geometric_mean_iters(records: &[BenchmarkRecord], cap: usize) -> Result<f64, BenchError> {
    if cap == 0 {
        return Err(BenchError::Stats("cap must be positive".into()));
    }
    let values: Vec<f64> = records
        .iter()
        .map(|r| if r.converged() { r.iters.max(1) } else { cap } as f64)
        .collect();
    geometric_mean(&values)
}

/// Which counter a summary column averages.
#[derive(Debug, Clone, Copy)]
enum Counter {
    Iters,
    Fevals,
    Gevals,
}

/// Geometric mean of a counter, with each failed run contributing its own
/// iteration cap.
fn gmean_with_own_caps(records: &[&BenchmarkRecord], counter: Counter) -> Result<f64, BenchError> {
    let values: Vec<f64> = records
        .iter()
        .map(|r| {
            let v = if !r.converged() {
                r.max_iter
            } else {
                match counter {
                    Counter::Iters => r.iters,
                    Counter::Fevals => r.fevals,
                    Counter::Gevals => r.gevals,
                }
            };
            v.max(1) as f64
        })
        .collect();
    geometric_mean(&values)
}

/// Per-solver summary row.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSummary {
    pub solver: String,
    pub problems: usize,
    pub failures: usize,
    pub gmean_iters: f64,
    pub gmean_fevals: f64,
    pub gmean_gevals: f64,
}

/// One row per solver, sorted by solver name.
pub fn summarize(records: &[BenchmarkRecord]) -> Result<Vec<SolverSummary>, BenchError> {
    let mut by_solver: BTreeMap<&str, Vec<&BenchmarkRecord>> = BTreeMap::new();
    for r in records {
        by_solver.entry(&r.solver).or_default().push(r);
    }
    by_solver
        .into_iter()
        .map(|(solver, rs)| {
            Ok(SolverSummary {
                solver: solver.to_string(),
                problems: rs.len(),
                failures: rs.iter().filter(|r| !r.converged()).count(),
                gmean_iters: gmean_with_own_caps(&rs, Counter::Iters)?,
                gmean_fevals: gmean_with_own_caps(&rs, Counter::Fevals)?,
                gmean_gevals: gmean_with_own_caps(&rs, Counter::Gevals)?,
            })
        })
        .collect()
}

/// Fraction of problems solved within each budget of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub solver: String,
    pub points: Vec<(usize, f64)>,
}

/// Fraction-solved curves, one per solver, sorted by solver name. Every
/// solver must have been run on the same problem set.
pub fn performance_profile(records: &[BenchmarkRecord], iter_grid: &[usize]) -> Result<Vec<ProfileCurve>, BenchError> {
    let mut by_solver: BTreeMap<&str, Vec<&BenchmarkRecord>> = BTreeMap::new();
    for r in records {
        by_solver.entry(&r.solver).or_default().push(r);
    }
    let sets: BTreeMap<&str, BTreeSet<&str>> = by_solver
        .iter()
        .map(|(s, rs)| (*s, rs.iter().map(|r| r.problem.as_str()).collect()))
        .collect();
    let union: BTreeSet<&str> = sets.values().flatten().copied().collect();
    let asymmetric: BTreeSet<&str> = sets
        .values()
        .flat_map(|set| union.difference(set).copied())
        .collect();
    if !asymmetric.is_empty() {
        let list: Vec<&str> = asymmetric.into_iter().collect();
        return Err(BenchError::Stats(format!(
            "solvers were run on different problem sets; asymmetric problems: {}",
            list.join(", ")
        )));
    }
    let mut grid = iter_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    Ok(by_solver
        .into_iter()
        .map(|(solver, rs)| {
            let n = rs.len() as f64;
            let points = grid
                .iter()
                .map(|&t| {
                    let solved = rs.iter().filter(|r| r.converged() && r.iters <= t).count();
                    (t, solved as f64 / n)
                })
                .collect();
            ProfileCurve {
                solver: solver.to_string(),
                points,
            }
        })
        .collect())
}

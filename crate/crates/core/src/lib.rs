//! Consistently adaptive trust-region minimization.
//!
//! [`driver::minimize`] runs the method on any [`problem::Objective`];
//! [`classic::classic_minimize`] is the conventional trust-region baseline
//! sharing the same subproblem solver in [`trs`].

pub mod classic;
pub mod convergence;
pub mod driver;
mod engine;
pub mod problem;
pub mod trace;
pub mod trs;

pub use classic::{cat_theta_ablation, classic_minimize, ClassicConfig};
pub use driver::{minimize, rho_hat, step, validate_config, CatConfig, ConfigError};
pub use engine::{SolverState, MAX_NONFINITE_TRIALS};
pub use problem::{Objective, Point, ProblemError};
pub use trace::{IterationRecord, MinimizeOutcome, TerminationStatus};
pub use trs::{model_value, solve_trs, SubproblemInputs, SubproblemSolution};

//! The consistently adaptive trust-region method.

use thiserror::Error;

use crate::engine::{self, SolverState, StepPolicy};
use crate::problem::{Objective, Point, ProblemError};
use crate::trace::{IterationRecord, MinimizeOutcome, TerminationStatus};
use crate::trs::CertificateParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("invalid `{name}` = {value}: {reason}")]
    Range {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("beta*theta/(gamma3*(1-beta)) + gamma1 = {value} must be < 1")]
    Compound { value: f64 },
    #[error("start point: {0}")]
    Start(#[from] ProblemError),
}

fn range(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<(), ConfigError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Range { name, value, reason })
    }
}

/// Parameters of the method. `theta = 0` disables the gradient term of the
/// ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatConfig {
    pub r1: f64,
    pub beta: f64,
    pub theta: f64,
    pub omega: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub eps: f64,
    pub max_iter: usize,
}

impl Default for CatConfig {
    fn default() -> Self {
        Self {
            r1: 1.0,
            beta: 0.1,
            theta: 0.1,
            omega: 8.0,
            gamma1: 0.0,
            gamma2: 0.8,
            gamma3: 1.0,
            eps: 1e-5,
            max_iter: 10_000,
        }
    }
}

impl CatConfig {
    /// Left-hand side of the compound parameter requirement.
    pub fn compound_value(&self) -> f64 {
        self.beta * self.theta / (self.gamma3 * (1.0 - self.beta)) + self.gamma1
    }

    pub fn certificate_params(&self) -> CertificateParams {
        CertificateParams {
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            gamma3: self.gamma3,
        }
    }
}

/// Check every parameter range; the first violation is reported.
pub fn validate_config(cfg: &CatConfig) -> Result<(), ConfigError> {
    range("r1", cfg.r1, cfg.r1 > 0.0, "must be positive")?;
    range("beta", cfg.beta, cfg.beta > 0.0 && cfg.beta < 1.0, "must lie in (0, 1)")?;
    range("theta", cfg.theta, (0.0..1.0).contains(&cfg.theta), "must lie in [0, 1)")?;
    range("omega", cfg.omega, cfg.omega > 1.0, "must exceed 1")?;
    range("gamma1", cfg.gamma1, (0.0..1.0).contains(&cfg.gamma1), "must lie in [0, 1)")?;
    range(
        "gamma2",
        cfg.gamma2,
        cfg.gamma2 > 1.0 / cfg.omega && cfg.gamma2 <= 1.0,
        "must lie in (1/omega, 1]",
    )?;
    range("gamma3", cfg.gamma3, cfg.gamma3 > 0.0 && cfg.gamma3 <= 1.0, "must lie in (0, 1]")?;
    range("eps", cfg.eps, cfg.eps > 0.0, "must be positive")?;
    range("max_iter", cfg.max_iter as f64, cfg.max_iter > 0, "must be positive")?;
    let value = cfg.compound_value();
    if !(value < 1.0) {
        return Err(ConfigError::Compound { value });
    }
    Ok(())
}

/// Actual reduction over the model reduction augmented by
/// `theta/2 * |grad f(x+d)| * |d|`. A zero denominator yields `+inf`.
pub fn rho_hat(f_k: f64, f_trial: f64, m_val: f64, grad_trial_norm: f64, d_norm: f64, theta: f64) -> f64 {
    let denom = -m_val + 0.5 * theta * grad_trial_norm * d_norm;
    if denom == 0.0 {
        return f64::INFINITY;
    }
    (f_k - f_trial) / denom
}

/// Constant `c1` with `|grad f(x+d)| <= c1 L |d|^2` whenever the step is
/// short (`|d| < gamma2 r`) or unsuccessful (`rho_hat <= beta`).
pub fn gradient_bound_constant(cfg: &CatConfig) -> f64 {
    let (b, g1, g3, th) = (cfg.beta, cfg.gamma1, cfg.gamma3, cfg.theta);
    let a = (5.0 - 3.0 * b) / (6.0 * (g3 * (1.0 - g1) * (1.0 - b) - b * th));
    a.max(1.0 / (2.0 * (1.0 - g1)))
}

impl StepPolicy for CatConfig {
    fn eps(&self) -> f64 {
        self.eps
    }
    fn max_iter(&self) -> usize {
        self.max_iter
    }
    fn initial_radius(&self) -> f64 {
        self.r1
    }
    fn certificate(&self) -> CertificateParams {
        self.certificate_params()
    }
    fn ratio(&self, f_k: f64, f_trial: f64, m_val: f64, grad_trial_norm: f64, d_norm: f64) -> f64 {
        rho_hat(f_k, f_trial, m_val, grad_trial_norm, d_norm, self.theta)
    }
    fn accept(&self, _ratio: f64, f_k: f64, f_trial: f64) -> bool {
        f_trial <= f_k
    }
    fn next_radius(&self, ratio: f64, _radius: f64, d_norm: f64) -> f64 {
        if ratio >= self.beta {
            self.omega * d_norm
        } else {
            d_norm / self.omega
        }
    }
}

/// Fresh state at `x1` with radius `cfg.r1`.
pub fn initial_state<P: Objective + ?Sized>(p: &P, x1: &Point, cfg: &CatConfig) -> SolverState {
    SolverState::new(p, x1, cfg.r1)
}

/// One iteration. The state is advanced in place unless a termination status
/// is returned.
pub fn step<P: Objective + ?Sized>(
    state: &mut SolverState,
    p: &P,
    cfg: &CatConfig,
) -> (Option<IterationRecord>, Option<TerminationStatus>) {
    engine::step_with(state, p, cfg)
}

pub fn minimize<P: Objective + ?Sized>(p: &P, x1: &Point, cfg: &CatConfig) -> Result<MinimizeOutcome, ConfigError> {
    validate_config(cfg)?;
    check_start(p, x1)?;
    Ok(engine::run(p, x1, cfg))
}

pub(crate) fn check_start<P: Objective + ?Sized>(p: &P, x1: &Point) -> Result<(), ConfigError> {
    if x1.dimension() != p.dimension() {
        return Err(ProblemError::Dimension {
            expected: p.dimension(),
            got: x1.dimension(),
        }
        .into());
    }
    Ok(())
}

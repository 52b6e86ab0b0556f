//! Classic trust-region baseline and the theta = 0 ablation of CAT.
//!
//! The baseline shares the subproblem solver and termination rule with CAT;
//! it scores steps with the plain actual-over-predicted ratio and scales the
//! previous radius rather than the step length.

use crate::driver::{check_start, minimize, validate_config, CatConfig, ConfigError};
use crate::engine::{self, StepPolicy};
use crate::problem::{Objective, Point};
use crate::trace::MinimizeOutcome;
use crate::trs::CertificateParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicConfig {
    pub r1: f64,
    pub beta: f64,
    pub omega: f64,
    /// Steps with ratio at least this value are accepted.
    pub accept_eta: f64,
    /// Lower end of the boundary window used by the subproblem solver.
    pub gamma2: f64,
    pub eps: f64,
    pub max_iter: usize,
}

impl Default for ClassicConfig {
    fn default() -> Self {
        Self {
            r1: 1.0,
            beta: 0.1,
            omega: 8.0,
            accept_eta: 0.0,
            gamma2: 0.8,
            eps: 1e-5,
            max_iter: 10_000,
        }
    }
}

fn range(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<(), ConfigError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Range { name, value, reason })
    }
}

pub fn validate_classic_config(cfg: &ClassicConfig) -> Result<(), ConfigError> {
    range("r1", cfg.r1, cfg.r1 > 0.0, "must be positive")?;
    range("beta", cfg.beta, cfg.beta > 0.0 && cfg.beta < 1.0, "must lie in (0, 1)")?;
    range("omega", cfg.omega, cfg.omega > 1.0, "must exceed 1")?;
    range(
        "accept_eta",
        cfg.accept_eta,
        cfg.accept_eta >= 0.0 && cfg.accept_eta <= cfg.beta,
        "must lie in [0, beta]",
    )?;
    range(
        "gamma2",
        cfg.gamma2,
        cfg.gamma2 > 1.0 / cfg.omega && cfg.gamma2 <= 1.0,
        "must lie in (1/omega, 1]",
    )?;
    range("eps", cfg.eps, cfg.eps > 0.0, "must be positive")?;
    range("max_iter", cfg.max_iter as f64, cfg.max_iter > 0, "must be positive")
}

/// Actual over predicted reduction; `+inf` when the model predicts nothing.
pub fn classic_ratio(f_k: f64, f_trial: f64, m_val: f64) -> f64 {
    if m_val == 0.0 {
        return f64::INFINITY;
    }
    (f_k - f_trial) / -m_val
}

impl StepPolicy for ClassicConfig {
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
        CertificateParams {
            gamma1: 0.0,
            gamma2: self.gamma2,
            gamma3: 1.0,
        }
    }
    fn ratio(&self, f_k: f64, f_trial: f64, m_val: f64, _grad_trial_norm: f64, _d_norm: f64) -> f64 {
        classic_ratio(f_k, f_trial, m_val)
    }
    fn accept(&self, ratio: f64, _f_k: f64, _f_trial: f64) -> bool {
        ratio >= self.accept_eta
    }
    fn next_radius(&self, ratio: f64, radius: f64, _d_norm: f64) -> f64 {
        if ratio >= self.beta {
            self.omega * radius
        } else {
            radius / self.omega
        }
    }
}

pub fn classic_minimize<P: Objective + ?Sized>(
    p: &P,
    x1: &Point,
    cfg: &ClassicConfig,
) -> Result<MinimizeOutcome, ConfigError> {
    validate_classic_config(cfg)?;
    check_start(p, x1)?;
    Ok(engine::run(p, x1, cfg))
}

/// CAT with the gradient term of the ratio switched off. Any `theta` in
/// `cfg` is overridden.
pub fn cat_theta_ablation<P: Objective + ?Sized>(
    p: &P,
    x1: &Point,
    cfg: &CatConfig,
) -> Result<MinimizeOutcome, ConfigError> {
    let cfg = CatConfig { theta: 0.0, ..*cfg };
    validate_config(&cfg)?;
    minimize(p, x1, &cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::QuadraticProblem;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn first_classic_step_on_half_square() {
        let p = QuadraticProblem::new("q", DMatrix::from_element(1, 1, 1.0), DVector::zeros(1), 0.0).unwrap();
        let x1 = Point::from_slice(&[10.0]).unwrap();
        let cfg = ClassicConfig {
            gamma2: 1.0,
            ..ClassicConfig::default()
        };
        let out = classic_minimize(&p, &x1, &cfg).unwrap();
        let first = &out.trace[0];
        assert_eq!(first.rho_hat, 1.0);
        assert!(first.accepted);
        assert_eq!(first.r_next, 8.0);
    }

    #[test]
    fn eta_above_beta_rejected() {
        let cfg = ClassicConfig {
            accept_eta: 0.2,
            ..ClassicConfig::default()
        };
        assert!(matches!(
            validate_classic_config(&cfg),
            Err(ConfigError::Range { name: "accept_eta", .. })
        ));
        validate_classic_config(&ClassicConfig::default()).unwrap();
    }
}

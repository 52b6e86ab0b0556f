//! Empirical convergence-order measurement.

use nalgebra::DVector;
use thiserror::Error;

use crate::problem::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvergenceError {
    #[error("need at least {needed} tail points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("iterate dimension {got} does not match x_star dimension {expected}")]
    Dimension { expected: usize, got: usize },
}

/// `(e_k, e_{k+1} / e_k^2)` for consecutive errors `e_k = |x_k - x_star|`.
///
/// Zero errors are dropped (a ratio against an exact hit is meaningless);
/// at least three nonzero errors are required.
pub fn measure_convergence_order(
    iterates: &[DVector<f64>],
    x_star: &Point,
) -> Result<Vec<(f64, f64)>, ConvergenceError> {
    let mut errors = Vec::with_capacity(iterates.len());
    for x in iterates {
        if x.len() != x_star.dimension() {
            return Err(ConvergenceError::Dimension {
                expected: x_star.dimension(),
                got: x.len(),
            });
        }
        let e = (x - x_star.as_vector()).norm();
        if e > 0.0 {
            errors.push(e);
        }
    }
    order_ratios(&errors)
}

/// Same ratios computed directly from an error sequence.
pub fn order_ratios(errors: &[f64]) -> Result<Vec<(f64, f64)>, ConvergenceError> {
    if errors.len() < 3 {
        return Err(ConvergenceError::InsufficientData {
            needed: 3,
            got: errors.len(),
        });
    }
    Ok(errors.windows(2).map(|w| (w[0], w[1] / (w[0] * w[0]))).collect())
}

/// True when the last `tail` ratios are all finite and at most `bound`, and
/// the errors in that window strictly decrease.
pub fn is_quadratic_tail(ratios: &[(f64, f64)], tail: usize, bound: f64) -> bool {
    if tail == 0 || ratios.len() < tail {
        return false;
    }
    let window = &ratios[ratios.len() - tail..];
    let bounded = window.iter().all(|&(_, q)| q.is_finite() && q <= bound);
    let shrinking = window.windows(2).all(|w| w[1].0 < w[0].0);
    bounded && shrinking
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_quadratic_sequence() {
        let errors: Vec<f64> = (1..=4).map(|k| 10f64.powi(-(1 << k))).collect();
        let ratios = order_ratios(&errors).unwrap();
        for (_, q) in &ratios {
            assert!((q - 1.0).abs() < 1e-9, "{q}");
        }
        assert!(is_quadratic_tail(&ratios, 3, 10.0));
    }

    #[test]
    fn linear_sequence_rejected() {
        let errors: Vec<f64> = (1..=20).map(|k| 0.5f64.powi(k)).collect();
        let ratios = order_ratios(&errors).unwrap();
        for (i, (_, q)) in ratios.iter().enumerate() {
            assert_eq!(*q, 2f64.powi(i as i32));
        }
        assert!(!is_quadratic_tail(&ratios, 3, 10.0));
    }

    #[test]
    fn too_short() {
        assert_eq!(
            order_ratios(&[1.0, 0.1]),
            Err(ConvergenceError::InsufficientData { needed: 3, got: 2 })
        );
    }
}

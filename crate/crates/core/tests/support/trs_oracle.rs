//! Independent reference solver for the trust-region subproblem, shared by
//! integration tests.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Cyclic Jacobi eigenvalue iteration; returns `(eigenvalues, eigenvectors)`
/// with eigenvectors in the columns.
fn jacobi_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() < 1e-15 * a.norm().max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

/// Global minimum of `g'd + d'Hd/2` over `|d| <= r`, in eigen coordinates.
pub fn oracle_min(g: &DVector<f64>, h: &DMatrix<f64>, r: f64) -> f64 {
    let (lam, q) = jacobi_eigen(h);
    let gh: Vec<f64> = (0..lam.len()).map(|i| q.column(i).dot(g)).collect();
    let lmin = lam.iter().copied().fold(f64::INFINITY, f64::min);
    let value_at = |delta: f64, skip_min: bool| -> (f64, f64) {
        let mut norm2 = 0.0;
        let mut m = 0.0;
        for (l, c) in lam.iter().zip(&gh) {
            if skip_min && (*l - lmin).abs() <= 1e-12 * (1.0 + lmin.abs()) {
                continue;
            }
            let y = -c / (l + delta);
            norm2 += y * y;
            m += 0.5 * l * y * y + c * y;
        }
        (norm2.sqrt(), m)
    };
    if lmin > 0.0 {
        let (nd, m) = value_at(0.0, false);
        if nd <= r {
            return m;
        }
    }
    let lo = (-lmin).max(0.0);
    let norm_at = |delta: f64| value_at(delta, false).0;
    let scale = 1.0 + lam.iter().map(|l| l.abs()).fold(0.0, f64::max) + g.norm() / r;
    // Dense logarithmic grid above the pole for the first point inside the ball.
    let mut prev = lo;
    let mut found = None;
    for i in 0..=400 {
        let delta = lo + scale * 10f64.powf(-14.0 + 18.0 * i as f64 / 400.0);
        if norm_at(delta) <= r {
            found = Some((prev, delta));
            break;
        }
        prev = delta;
    }
    let (mut a, mut b) = found.expect("grid brackets the secular equation");
    for _ in 0..300 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if norm_at(mid) > r {
            a = mid;
        } else {
            b = mid;
        }
    }
    let (nd, m) = value_at(b, false);
    // Hard case: the shifted step never reaches the boundary; pad with the
    // minimal eigenvector.
    let (nv, mv) = value_at(lo, true);
    if lmin < 0.0 && nv < r && (r - nd) > 1e-9 * r {
        return mv + 0.5 * lmin * (r * r - nv * nv);
    }
    m
}

pub fn random_instance(rng: &mut ChaCha8Rng) -> (DVector<f64>, DMatrix<f64>) {
    let n = rng.random_range(1..=6);
    let mut h = DMatrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
    h = (&h + h.transpose()) * 0.5;
    let g = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
    (g, h)
}

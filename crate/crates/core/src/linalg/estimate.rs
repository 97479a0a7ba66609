// SPDX-License-Identifier: Apache-2.0

//! Iterative spectral estimates: logarithmic norm and spectral radius.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{axpy, dot, norm2, LinearOperator, ZERO};
use crate::error::{Error, Result};

const MAX_POWER_ITERATIONS: usize = 5000;
const MAX_LANCZOS_STEPS: usize = 500;
const START_SEED: u64 = 0x5eed_1234_abcd_0001;

/// Deterministic start vector (splitmix64 stream), unit 2-norm.
pub(crate) fn seeded_unit_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut state = seed;
    let mut next = move || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut v: Vec<Complex64> = (0..n).map(|_| Complex64::new(next(), next())).collect();
    let nrm = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nrm);
    v
}

/// Logarithmic 2-norm `μ(A)`: the largest eigenvalue of `(A + A^H)/2`.
///
/// Lanczos with full reorthogonalization on the Hermitian part; the
/// largest Ritz value is accepted once its residual bound drops below
/// `1e-10` relative to the spectral scale seen so far.
pub fn log_norm(a: &dyn LinearOperator) -> Result<f64> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::contract("log_norm: empty operator"));
    }
    let herm = |x: &[Complex64], y: &mut [Complex64]| {
        let mut t = vec![ZERO; n];
        a.apply_into(x, y);
        a.apply_adjoint_into(x, &mut t);
        for (yi, ti) in y.iter_mut().zip(&t) {
            *yi = (*yi + ti) * 0.5;
        }
    };

    let max_steps = n.min(MAX_LANCZOS_STEPS);
    let mut basis: Vec<Vec<Complex64>> = vec![seeded_unit_vector(n, START_SEED)];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![ZERO; n];
    let mut best = f64::NAN;
    let mut residual = f64::INFINITY;

    for k in 0..max_steps {
        herm(&basis[k], &mut w);
        let a_k = dot(&basis[k], &w).re;
        alpha.push(a_k);
        for _ in 0..2 {
            for q in &basis {
                let h = dot(q, &w);
                axpy(-h, q, &mut w);
            }
        }
        let b_k = norm2(&w);

        let (theta, last) = top_ritz_pair(&alpha, &beta);
        let scale = alpha
            .iter()
            .chain(beta.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(theta.abs());
        best = theta;
        residual = b_k * last.abs();
        if b_k <= 1e-14 * scale.max(f64::MIN_POSITIVE) || residual <= 1e-10 * scale || k + 1 == n {
            return Ok(theta);
        }
        beta.push(b_k);
        basis.push(w.iter().map(|v| v / b_k).collect());
    }
    Err(Error::EstimateFailed {
        what: "log_norm (Lanczos)",
        iterations: max_steps,
        best,
        residual,
    })
}

/// Largest eigenvalue of the symmetric tridiagonal and the last entry of
/// its eigenvector.
fn top_ritz_pair(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (idx, theta) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    (theta, eig.eigenvectors[(k - 1, idx)])
}

/// Spectral radius by power iteration from a seeded start vector.
///
/// The estimate is `‖A x_k‖` for the normalized iterate. Convergence is
/// judged on the Aitken-extrapolated remainder, and the extrapolated value
/// is returned.
pub fn spectral_radius_estimate(a: &dyn LinearOperator) -> Result<f64> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::contract("spectral_radius_estimate: empty operator"));
    }
    let mut x = seeded_unit_vector(n, START_SEED);
    let mut y = vec![ZERO; n];
    let mut prev = f64::NAN;
    let mut prev_diff = f64::NAN;
    let mut best = 0.0;
    let mut remainder = f64::INFINITY;

    for _ in 0..MAX_POWER_ITERATIONS {
        a.apply_into(&x, &mut y);
        let theta = norm2(&y);
        if theta == 0.0 {
            return Ok(0.0);
        }
        y.iter().zip(x.iter_mut()).for_each(|(yi, xi)| *xi = yi / theta);

        let diff = theta - prev;
        if diff.abs() <= 1e-15 * theta {
            return Ok(theta);
        }
        let q = diff / prev_diff;
        if q.is_finite() && q > 0.0 && q < 1.0 {
            remainder = diff * q / (1.0 - q);
            best = theta + remainder;
            if remainder.abs() <= 1e-9 * theta {
                return Ok(best);
            }
        } else {
            best = theta;
        }
        prev = theta;
        prev_diff = diff;
    }
    if remainder.abs() <= 1e-4 * best.abs() {
        return Ok(best);
    }
    Err(Error::EstimateFailed {
        what: "spectral_radius_estimate (power iteration)",
        iterations: MAX_POWER_ITERATIONS,
        best,
        residual: remainder.abs(),
    })
}

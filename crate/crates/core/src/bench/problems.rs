// SPDX-License-Identifier: Apache-2.0

//! Periodic Schrödinger benchmarks `i u_t = −ε Δu + f(t) s(x)` with
//! `f(t) = (1+i) sin²t`, written as `u' = iε D u − i f(t) s`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gsource::{Expr, GSource, ProfileTerm};
use crate::linalg::{ComplexVector, SparseOperator};

/// A linear inhomogeneous test problem on `[0, horizon]`.
#[derive(Debug, Clone)]
pub struct BenchmarkProblem {
    pub a: SparseOperator,
    pub src: GSource,
    pub u0: ComplexVector,
    pub horizon: f64,
    pub label: String,
    pub epsilon: f64,
}

impl BenchmarkProblem {
    pub fn dim(&self) -> usize {
        self.a.n()
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }
}

/// `−i (1+i) sin²t = (1−i) sin²t`.
fn forcing_profile() -> Expr {
    Expr::mul(vec![Expr::constant(1.0, -1.0), Expr::square(Expr::sin(Expr::T))])
}

/// Triplets of the periodic second-difference matrix on `n` points, `1/h²` scaled.
fn periodic_laplacian(n: usize) -> Vec<(usize, usize, f64)> {
    let s = (n * n) as f64;
    (0..n)
        .flat_map(|j| {
            [
                (j, (j + n - 1) % n, s),
                (j, j, -2.0 * s),
                (j, (j + 1) % n, s),
            ]
        })
        .collect()
}

fn check_size(n: usize) -> Result<()> {
    if n < 8 {
        return Err(Error::contract(format!("grid size {n} must be at least 8")));
    }
    Ok(())
}

/// One-dimensional problem on `n` periodic points `x_j = j/n`.
pub fn schrodinger_1d(n: usize, epsilon: f64) -> Result<BenchmarkProblem> {
    check_size(n)?;
    let scale = Complex64::new(0.0, epsilon);
    let trips: Vec<_> = periodic_laplacian(n)
        .into_iter()
        .map(|(i, j, v)| (i, j, scale * v))
        .collect();
    let a = SparseOperator::from_triplets(n, &trips)?;
    let x = |j: usize| j as f64 / n as f64;
    let s = ComplexVector::from_iterator(n, (0..n).map(|j| Complex64::new((16.0 * PI * x(j) * (1.0 - x(j))).sin(), 0.0)));
    let u0 = ComplexVector::from_iterator(n, (0..n).map(|j| Complex64::new((-100.0 * (x(j) - 0.5).powi(2)).exp(), 0.0)));
    Ok(BenchmarkProblem {
        a,
        src: GSource::separable(n, vec![ProfileTerm::new(forcing_profile(), s)])?,
        u0,
        horizon: 1.0,
        label: format!("schrodinger1d(n={n}, eps={epsilon:e})"),
        epsilon,
    })
}

/// Two-dimensional problem on the `m × m` periodic grid; the unknown at
/// `(x_j, y_k)` has index `j + m k` and the operator is `D ⊗ I + I ⊗ D`.
pub fn schrodinger_2d(m: usize, epsilon: f64) -> Result<BenchmarkProblem> {
    check_size(m)?;
    let n = m * m;
    let scale = Complex64::new(0.0, epsilon);
    let lap = periodic_laplacian(m);
    let mut trips = Vec::with_capacity(5 * n);
    for k in 0..m {
        for &(i, j, v) in &lap {
            // x-direction within the row block k, y-direction across blocks
            trips.push((i + m * k, j + m * k, scale * v));
            trips.push((k + m * i, k + m * j, scale * v));
        }
    }
    let a = SparseOperator::from_triplets(n, &trips)?;
    let coord = |j: usize| j as f64 / m as f64;
    let at = |idx: usize| (coord(idx % m), coord(idx / m));
    let s = ComplexVector::from_iterator(
        n,
        (0..n).map(|idx| {
            let (x, y) = at(idx);
            Complex64::new((16.0 * PI * x * (1.0 - x) * y * (1.0 - y)).sin(), 0.0)
        }),
    );
    let u0 = ComplexVector::from_iterator(
        n,
        (0..n).map(|idx| {
            let (x, y) = at(idx);
            Complex64::new((-100.0 * ((x - 0.5).powi(2) + (y - 0.5).powi(2))).exp(), 0.0)
        }),
    );
    Ok(BenchmarkProblem {
        a,
        src: GSource::separable(n, vec![ProfileTerm::new(forcing_profile(), s)])?,
        u0,
        horizon: 1.0,
        label: format!("schrodinger2d(m={m}, eps={epsilon:e})"),
        epsilon,
    })
}

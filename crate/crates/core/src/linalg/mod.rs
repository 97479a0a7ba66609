// SPDX-License-Identifier: Apache-2.0

//! Complex linear algebra primitives.

mod estimate;
mod expm;
pub mod mtx;
mod phi;
mod sparse;

pub use estimate::{log_norm, spectral_radius_estimate};
#[cfg(test)]
pub(crate) use estimate::seeded_unit_vector;
pub use expm::dense_expm;
pub use phi::{phi_matrix, phi_scalar};
pub use sparse::SparseOperator;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Dense complex vector.
pub type ComplexVector = DVector<Complex64>;

/// Dense complex matrix, column-major.
pub type DenseMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Anything that can be applied to a vector, together with its adjoint.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]);
    fn apply_adjoint_into(&self, x: &[Complex64], y: &mut [Complex64]);
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = ZERO);
        for (j, &xj) in x.iter().enumerate() {
            if xj == ZERO {
                continue;
            }
            for (yi, &a) in y.iter_mut().zip(self.column(j).iter()) {
                *yi += a * xj;
            }
        }
    }

    fn apply_adjoint_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = self
                .column(j)
                .iter()
                .zip(x)
                .map(|(a, &xi)| a.conj() * xi)
                .sum();
        }
    }
}

/// `x^H y`
pub fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm2(x: &[Complex64]) -> f64 {
    // scaled to survive the large coefficient columns of Bessel expansions
    let scale = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = x.iter().map(|v| (v / scale).norm_sqr()).sum();
    scale * s.sqrt()
}

/// `y += a x`
pub fn axpy(a: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn all_finite(x: &[Complex64]) -> bool {
    x.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Induced 1-norm (max column sum).
pub fn norm1(m: &DenseMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Spectral norm via singular values.
pub fn spectral_norm(m: &DenseMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// 2-norm condition number via singular values.
pub fn condition_number(m: &DenseMatrix) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

/// Embed a real matrix.
pub fn complexify(m: &DMatrix<f64>) -> DenseMatrix {
    m.map(|v| Complex64::new(v, 0.0))
}

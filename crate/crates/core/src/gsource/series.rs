// SPDX-License-Identifier: Apache-2.0

//! Truncated Taylor series arithmetic.

use num_complex::Complex64;

use crate::linalg::ZERO;

/// Coefficients `a_0..a_{K−1}` of `Σ a_k s^k`, truncated at `s^K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series(pub Vec<Complex64>);

impl Series {
    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut v = vec![ZERO; order];
        if let Some(first) = v.first_mut() {
            *first = c;
        }
        Series(v)
    }

    /// The independent variable `t = t0 + s`.
    pub fn variable(t0: f64, order: usize) -> Self {
        let mut s = Series::constant(Complex64::new(t0, 0.0), order);
        if order > 1 {
            s.0[1] = Complex64::new(1.0, 0.0);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Series) -> Series {
        Series(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Series) -> Series {
        Series(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Series {
        Series(self.0.iter().map(|a| -a).collect())
    }

    pub fn mul(&self, other: &Series) -> Series {
        let k = self.order();
        let mut out = vec![ZERO; k];
        for (i, a) in self.0.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (o, b) in out[i..].iter_mut().zip(&other.0) {
                *o += a * b;
            }
        }
        Series(out)
    }

    pub fn exp(&self) -> Series {
        let a = &self.0;
        let mut b = vec![ZERO; a.len()];
        if a.is_empty() {
            return Series(b);
        }
        b[0] = a[0].exp();
        for k in 1..a.len() {
            let s: Complex64 = (1..=k).map(|j| a[j] * b[k - j] * j as f64).sum();
            b[k] = s / k as f64;
        }
        Series(b)
    }

    /// `(sin a, cos a)` by the coupled recurrence.
    pub fn sin_cos(&self) -> (Series, Series) {
        let a = &self.0;
        let n = a.len();
        let mut s = vec![ZERO; n];
        let mut c = vec![ZERO; n];
        if n > 0 {
            s[0] = a[0].sin();
            c[0] = a[0].cos();
        }
        for k in 1..n {
            let mut ds = ZERO;
            let mut dc = ZERO;
            for j in 1..=k {
                let ja = a[j] * j as f64;
                ds += ja * c[k - j];
                dc -= ja * s[k - j];
            }
            s[k] = ds / k as f64;
            c[k] = dc / k as f64;
        }
        (Series(s), Series(c))
    }
}

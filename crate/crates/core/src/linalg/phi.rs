// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;

use super::{dense_expm, DenseMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// `φ_ℓ(z) = Σ_{k≥0} z^k / (k+ℓ)!` for `ℓ ≥ 1`.
///
/// Small arguments (`|z| ≤ 1`, or `|z| < ℓ + 1` where the series has no
/// growing terms) use the compensated power series. Otherwise the
/// recurrence `φ_ℓ = (φ_{ℓ-1} - 1/(ℓ-1)!) / z` runs upward from `φ_0 = e^z`.
pub fn phi_scalar(ell: usize, z: Complex64) -> Result<Complex64> {
    if ell == 0 {
        return Err(Error::contract("phi_scalar: ell = 0 is the exponential"));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::contract("phi_scalar: non-finite argument"));
    }
    let r = z.norm();
    if r <= 1.0 || r < (ell + 1) as f64 {
        Ok(series(ell, z))
    } else {
        let mut phi = z.exp();
        let mut inv_fact = 1.0; // 1/(j-1)!
        for j in 1..=ell {
            if j > 1 {
                inv_fact /= (j - 1) as f64;
            }
            phi = (phi - inv_fact) / z;
        }
        Ok(phi)
    }
}

fn series(ell: usize, z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0 / factorial(ell), 0.0);
    let mut sum = ZERO;
    let mut comp = ZERO;
    for k in 0..600 {
        if k > 0 {
            term *= z / (k + ell) as f64;
        }
        // Kahan step
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if k >= 30 && term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// `φ_ℓ(M)` as the top-right block of the exponential of the block matrix
/// with `M` in the corner and identities on the block superdiagonal.
pub fn phi_matrix(ell: usize, m: &DenseMatrix) -> Result<DenseMatrix> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::contract("phi_matrix: matrix must be square"));
    }
    let size = n * (ell + 1);
    let mut big = DenseMatrix::zeros(size, size);
    big.view_mut((0, 0), (n, n)).copy_from(m);
    for b in 0..ell {
        for i in 0..n {
            big[(b * n + i, (b + 1) * n + i)] = ONE;
        }
    }
    let e = dense_expm(&big)?;
    Ok(e.view((0, ell * n), (n, n)).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(phi_scalar(1, ZERO).unwrap(), c(1.0, 0.0));
        assert_eq!(phi_scalar(2, ZERO).unwrap(), c(0.5, 0.0));
    }

    #[test]
    fn phi1_at_one() {
        let want = 1f64.exp() - 1.0;
        assert!((phi_scalar(1, c(1.0, 0.0)).unwrap().re - want).abs() < 1e-15);
    }

    #[test]
    fn phi1_closed_form_large_arguments() {
        for z in [c(5.0, 0.0), c(-40.0, 3.0), c(0.0, 25.0), c(2.0, -2.0)] {
            let want = (z.exp() - 1.0) / z;
            let got = phi_scalar(1, z).unwrap();
            assert!((got - want).norm() <= 1e-13 * want.norm(), "{z}");
        }
    }

    #[test]
    fn ell_zero_rejected() {
        assert!(matches!(
            phi_scalar(0, ZERO),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn scalar_matches_block_exponential() {
        for ell in [1, 2, 5, 12] {
            for z in [c(0.3, -0.2), c(3.0, 0.0), c(-7.0, 1.0), c(0.0, 15.0), c(14.0, 0.0)] {
                let m = DenseMatrix::from_element(1, 1, z);
                let want = phi_matrix(ell, &m).unwrap()[(0, 0)];
                let got = phi_scalar(ell, z).unwrap();
                assert!((got - want).norm() <= 1e-11 * want.norm(), "ell={ell} z={z}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn phi_matrix_of_diagonal() {
        let mut m = DenseMatrix::zeros(2, 2);
        m[(0, 0)] = c(-1.0, 0.0);
        m[(1, 1)] = c(0.0, 2.0);
        let p = phi_matrix(2, &m).unwrap();
        assert!((p[(0, 0)] - phi_scalar(2, c(-1.0, 0.0)).unwrap()).norm() < 1e-14);
        assert!((p[(1, 1)] - phi_scalar(2, c(0.0, 2.0)).unwrap()).norm() < 1e-14);
        assert!(p[(0, 1)].norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn recurrence_holds(ell in 1usize..=20, r in 0.0f64..50.0, theta in 0.0f64..std::f64::consts::TAU) {
            let z = Complex64::from_polar(r, theta);
            let lhs = z * phi_scalar(ell, z).unwrap() + 1.0 / factorial(ell - 1);
            let prev = if ell == 1 { z.exp() } else { phi_scalar(ell - 1, z).unwrap() };
            let scale = prev.norm().max(1.0 / factorial(ell - 1));
            prop_assert!((lhs - prev).norm() <= 1e-10 * scale, "lhs {} prev {}", lhs, prev);
        }
    }
}

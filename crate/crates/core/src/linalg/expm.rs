// SPDX-License-Identifier: Apache-2.0

//! Scaling and squaring with the [13/13] diagonal Padé approximant.

use num_complex::Complex64;

use super::{norm1, DenseMatrix};
use crate::error::{Error, Result};

const THETA_13: f64 = 5.37;

const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Matrix exponential `e^M`.
///
/// The scaling exponent is `s = max(0, ⌈log2(‖M‖₁ / θ₁₃)⌉)` and a single
/// approximant degree is used for every input.
pub fn dense_expm(m: &DenseMatrix) -> Result<DenseMatrix> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::contract(format!(
            "dense_expm: matrix is {}x{}, expected square",
            n,
            m.ncols()
        )));
    }
    if !super::all_finite(m.as_slice()) {
        return Err(Error::contract("dense_expm: non-finite entries"));
    }
    if n == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }

    let norm = norm1(m);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    if s > 1000 {
        return Err(Error::NumericOverflow(format!(
            "dense_expm: norm {norm:e} needs {s} squarings"
        )));
    }
    let a = m * Complex64::new(2f64.powi(-s), 0.0);

    let id = DenseMatrix::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| Complex64::new(PADE_13[k], 0.0);

    let u_inner = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u_inner = &a6 * u_inner + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1);
    let u = &a * u_inner;
    let v_inner = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = &a6 * v_inner + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);

    let denom = &v - &u;
    let numer = &v + &u;
    let mut r = denom
        .lu()
        .solve(&numer)
        .ok_or_else(|| Error::NumericOverflow("dense_expm: singular Padé denominator".into()))?;

    for _ in 0..s {
        r = &r * &r;
    }
    if !super::all_finite(r.as_slice()) {
        return Err(Error::NumericOverflow(format!(
            "dense_expm: overflow while squaring (norm {norm:e})"
        )));
    }
    Ok(r)
}

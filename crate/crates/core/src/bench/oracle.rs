// SPDX-License-Identifier: Apache-2.0

//! Reference solutions: classical RK4 certified by step doubling, with a
//! piecewise dense exponential of the augmented system as a cross-check for
//! small problems.

use num_complex::Complex64;

use super::BenchmarkProblem;
use crate::basis::{hessenberg, BasisFamily};
use crate::error::{Error, Result};
use crate::gsource::GSource;
use crate::linalg::{all_finite, axpy, dense_expm, norm2, ComplexVector, DenseMatrix, SparseOperator, ZERO};

/// Relative change between step sizes `h` and `h/2` required for certification.
pub const CERTIFY_TOL: f64 = 1e-9;
/// Agreement required between RK4 and the dense cross-check.
pub const CROSS_CHECK_TOL: f64 = 1e-8;
/// Largest dimension for which the dense cross-check runs.
pub const CROSS_CHECK_MAX_DIM: usize = 200;
const MAX_STEPS: usize = 1 << 24;
const CROSS_CHECK_TERMS: usize = 64;

/// Certified solution and how it was obtained.
#[derive(Debug, Clone)]
pub struct Reference {
    pub u: ComplexVector,
    /// RK4 steps of the finer of the two compared runs.
    pub steps: usize,
    /// Relative change between the last two step sizes.
    pub change: f64,
    /// Relative difference to the dense cross-check, when it ran.
    pub cross_check: Option<f64>,
}

fn rk4(a: &SparseOperator, src: &GSource, u0: &[Complex64], t: f64, steps: usize) -> Vec<Complex64> {
    let n = u0.len();
    let h = t / steps as f64;
    let homogeneous = src.is_zero();
    let rhs = |time: f64, u: &[Complex64], out: &mut [Complex64]| {
        a.spmv_into(u, out);
        if !homogeneous {
            axpy(Complex64::new(1.0, 0.0), src.eval(time).as_slice(), out);
        }
    };
    let mut u = u0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]);
    let mut tmp = vec![ZERO; n];
    for i in 0..steps {
        let t0 = i as f64 * h;
        rhs(t0, &u, &mut k1);
        for j in 0..n {
            tmp[j] = u[j] + k1[j] * (0.5 * h);
        }
        rhs(t0 + 0.5 * h, &tmp, &mut k2);
        for j in 0..n {
            tmp[j] = u[j] + k2[j] * (0.5 * h);
        }
        rhs(t0 + 0.5 * h, &tmp, &mut k3);
        for j in 0..n {
            tmp[j] = u[j] + k3[j] * h;
        }
        rhs(t0 + h, &tmp, &mut k4);
        for j in 0..n {
            u[j] += (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (h / 6.0);
        }
    }
    u
}

fn relative_change(coarse: &[Complex64], fine: &[Complex64]) -> f64 {
    let diff: Vec<_> = coarse.iter().zip(fine).map(|(a, b)| a - b).collect();
    let scale = norm2(fine);
    if scale == 0.0 {
        norm2(&diff)
    } else {
        norm2(&diff) / scale
    }
}

/// RK4 from `u0` to time `t`, halving the step until successive results
/// agree to [`CERTIFY_TOL`]; the returned value is the Richardson
/// extrapolation of the last pair.
pub fn certified_rk4(a: &SparseOperator, src: &GSource, u0: &[Complex64], t: f64) -> Result<Reference> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::contract(format!("reference time {t} must be finite and non-negative")));
    }
    if t == 0.0 {
        return Ok(Reference {
            u: ComplexVector::from_column_slice(u0),
            steps: 0,
            change: 0.0,
            cross_check: None,
        });
    }
    // start near the stability-limited step h‖A‖ ≈ 1/2
    let mut steps = ((2.0 * t * a.norm1()).ceil() as usize).clamp(8, MAX_STEPS);
    let mut coarse = rk4(a, src, u0, t, steps);
    loop {
        let fine = rk4(a, src, u0, t, 2 * steps);
        let finite = all_finite(&coarse) && all_finite(&fine);
        let change = if finite { relative_change(&coarse, &fine) } else { f64::INFINITY };
        if change < CERTIFY_TOL {
            let u = fine.iter().zip(&coarse).map(|(f, c)| f + (f - c) / 15.0);
            return Ok(Reference {
                u: ComplexVector::from_iterator(u0.len(), u),
                steps: 2 * steps,
                change,
                cross_check: None,
            });
        }
        if 4 * steps > MAX_STEPS {
            return Err(Error::OracleUncertified {
                change,
                steps: 2 * steps,
                coarse,
                fine,
            });
        }
        steps *= 2;
        coarse = fine;
    }
}

/// Exact-in-exact-arithmetic propagation over pieces of length ≤ 1: on
/// each piece `g` is replaced by its degree-63 Taylor polynomial and the
/// augmented system with the shift generator is exponentiated densely.
pub fn dense_reference(a: &SparseOperator, src: &GSource, u0: &[Complex64], t: f64) -> Result<ComplexVector> {
    let n = a.n();
    let m = CROSS_CHECK_TERMS;
    let pieces = t.ceil().max(1.0) as usize;
    let h = t / pieces as f64;
    let shift = hessenberg(BasisFamily::Monomial, m)?;
    let a_dense = a.to_dense();
    let mut u = ComplexVector::from_column_slice(u0);
    for p in 0..pieces {
        let t0 = p as f64 * h;
        let g = src.derivatives(m, t0)?;
        // balance column ℓ by σ^ℓ so that large derivatives stay representable
        let c = (1..m)
            .map(|l| norm2(g.column(l).as_slice()).powf(1.0 / l as f64))
            .fold(0.0, f64::max);
        let sigma = 1.0 / c.max(1.0);
        let mut big = DenseMatrix::zeros(n + m, n + m);
        big.view_mut((0, 0), (n, n)).copy_from(&a_dense);
        for l in 0..m {
            let col = g.column(l) * Complex64::new(sigma.powi(l as i32), 0.0);
            big.view_mut((0, n + l), (n, 1)).copy_from(&col);
        }
        big.view_mut((n, n), (m, m)).copy_from(&(&shift / Complex64::new(sigma, 0.0)));
        let e = dense_expm(&(big * Complex64::new(h, 0.0)))?;
        let mut start = ComplexVector::zeros(n + m);
        start.rows_mut(0, n).copy_from(&u);
        start[n] = Complex64::new(1.0, 0.0);
        u = (e * start).rows(0, n).into_owned();
    }
    Ok(u)
}

/// Certified reference for `p` at time `t ∈ [0, p.horizon]`.
pub fn reference_solution(p: &BenchmarkProblem, t: f64) -> Result<ComplexVector> {
    Ok(reference_report(p, t)?.u)
}

/// [`reference_solution`] with certification details.
pub fn reference_report(p: &BenchmarkProblem, t: f64) -> Result<Reference> {
    if t > p.horizon * (1.0 + 1e-12) {
        return Err(Error::contract(format!("reference time {t} beyond horizon {}", p.horizon)));
    }
    let mut r = certified_rk4(&p.a, &p.src, p.u0.as_slice(), t)?;
    if p.dim() <= CROSS_CHECK_MAX_DIM && t > 0.0 {
        let dense = dense_reference(&p.a, &p.src, p.u0.as_slice(), t)?;
        let diff = relative_change(dense.as_slice(), r.u.as_slice());
        r.cross_check = Some(diff);
        if !(diff <= CROSS_CHECK_TOL) {
            return Err(Error::OracleUncertified {
                change: diff,
                steps: r.steps,
                coarse: dense.as_slice().to_vec(),
                fine: r.u.as_slice().to_vec(),
            });
        }
    }
    Ok(r)
}

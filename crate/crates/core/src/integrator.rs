// SPDX-License-Identifier: Apache-2.0

//! Infinite Arnoldi exponential integrator.
//!
//! For `u' = A u + g(t0 + s)` with `g(t0 + s) = Σ_ℓ w_ℓ φ_ℓ(s)` the pair
//! `(u(s), φ̄(s))` solves the homogeneous system with block operator
//!
//! ```text
//! [ A  W ]
//! [ 0  H ]
//! ```
//!
//! whose leading blocks `A_k` only involve `w_0..w_{k−1}`. Arnoldi's method
//! on this operator, started from `(u0; e_1)`, produces basis vectors whose
//! `j`-th member has `n + j + 1` nonzero leading entries, so the infinite
//! operator can be applied exactly and no truncation of the expansion is
//! chosen in advance.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::basis::{apply_generator, BasisFamily, CoefficientMap, ExpansionCoefficients};
use crate::error::{Error, Result};
use crate::gsource::GSource;
use crate::linalg::{all_finite, axpy, dense_expm, dot, norm2, ComplexVector, DenseMatrix, SparseOperator, ZERO};

/// Relative size of the residual below which the Krylov space is taken as invariant.
pub const BREAKDOWN_TOL: f64 = 1e-14;

/// Output of one integration.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorResult {
    pub u: ComplexVector,
    /// Dimension of the Krylov space actually used.
    pub n_used: usize,
    pub breakdown: bool,
    /// `f_{k+1,k}` for each step taken; length `n_used`.
    pub f_subdiag: Vec<f64>,
    /// Square projected matrix `F_N`.
    pub f: DenseMatrix,
}

impl IntegratorResult {
    pub fn to_json(&self) -> Value {
        json!({
            "u": self.u.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
            "N": self.n_used,
            "breakdown": self.breakdown,
            "f_subdiag": self.f_subdiag,
        })
    }
}

/// Arnoldi basis with columns of growing length and the rectangular
/// Hessenberg matrix `F̲`.
#[derive(Debug, Clone)]
pub struct ArnoldiState {
    basis: Vec<Vec<Complex64>>,
    /// Column `j` of `F̲`, length `j + 2`.
    f_cols: Vec<Vec<Complex64>>,
    beta: f64,
    norm_estimate: f64,
    breakdown: bool,
}

impl ArnoldiState {
    /// Starts from `b / ‖b‖`.
    pub fn new(b: Vec<Complex64>) -> Result<Self> {
        let beta = norm2(&b);
        if beta == 0.0 {
            return Err(Error::contract("Arnoldi: starting vector is zero"));
        }
        if !beta.is_finite() {
            return Err(Error::NumericFailure {
                step: 0,
                reason: "non-finite starting vector".into(),
            });
        }
        let q0 = b.iter().map(|v| v / beta).collect();
        Ok(ArnoldiState {
            basis: vec![q0],
            f_cols: Vec::new(),
            beta,
            norm_estimate: 0.0,
            breakdown: false,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Completed steps.
    pub fn steps(&self) -> usize {
        self.f_cols.len()
    }

    pub fn breakdown(&self) -> bool {
        self.breakdown
    }

    /// Basis vectors, including the one produced by the last step.
    pub fn basis(&self) -> &[Vec<Complex64>] {
        &self.basis
    }

    /// `F̲` as a `(k+1) × k` matrix.
    pub fn hessenberg_full(&self) -> DenseMatrix {
        let k = self.steps();
        DenseMatrix::from_fn(k + 1, k, |i, j| self.f_cols[j].get(i).copied().unwrap_or(ZERO))
    }

    /// Leading `k × k` block of `F̲`.
    pub fn hessenberg_square(&self) -> DenseMatrix {
        let k = self.steps();
        DenseMatrix::from_fn(k, k, |i, j| self.f_cols[j].get(i).copied().unwrap_or(ZERO))
    }

    pub fn subdiagonal(&self) -> Vec<f64> {
        self.f_cols.iter().map(|c| c.last().map_or(0.0, |v| v.re)).collect()
    }

    /// One Arnoldi step with `w = apply(q_k)`; `w` may be longer than `q_k`.
    pub fn step(&mut self, apply: impl FnOnce(&[Complex64]) -> Result<Vec<Complex64>>) -> Result<()> {
        if self.breakdown {
            return Err(Error::contract("Arnoldi: step after breakdown"));
        }
        let k = self.steps();
        let mut w = apply(&self.basis[k])?;
        if !all_finite(&w) {
            return Err(Error::NumericFailure {
                step: k + 1,
                reason: "non-finite operator application".into(),
            });
        }
        let mut h = vec![ZERO; k + 2];
        let mut before = norm2(&w);
        self.norm_estimate = self.norm_estimate.max(before);
        for _pass in 0..2 {
            for (i, q) in self.basis.iter().enumerate() {
                let c = dot(q, &w[..q.len()]);
                axpy(-c, q, &mut w[..q.len()]);
                h[i] += c;
            }
            let after = norm2(&w);
            if after >= before * std::f64::consts::FRAC_1_SQRT_2 {
                break;
            }
            before = after;
        }
        let alpha = norm2(&w);
        if !alpha.is_finite() {
            return Err(Error::NumericFailure {
                step: k + 1,
                reason: "non-finite value during orthogonalization".into(),
            });
        }
        h[k + 1] = Complex64::new(alpha, 0.0);
        self.f_cols.push(h);
        if alpha <= BREAKDOWN_TOL * self.norm_estimate {
            self.breakdown = true;
            return Ok(());
        }
        w.iter_mut().for_each(|v| *v /= alpha);
        debug_assert!(self
            .basis
            .iter()
            .all(|q| dot(q, &w[..q.len()]).norm() < 1e-8));
        self.basis.push(w);
        Ok(())
    }

    /// `[I_n 0] Q_k exp(t F_k) e_1 β` where `k` is the number of steps taken.
    pub fn combine(&self, n: usize, t: f64) -> Result<IntegratorResult> {
        let k = self.steps();
        let f = self.hessenberg_square();
        let e = dense_expm(&(&f * Complex64::new(t, 0.0)))?;
        let mut u = ComplexVector::zeros(n);
        for (j, q) in self.basis.iter().take(k).enumerate() {
            axpy(e[(j, 0)] * self.beta, &q[..n], u.as_mut_slice());
        }
        Ok(IntegratorResult {
            u,
            n_used: k,
            breakdown: self.breakdown,
            f_subdiag: self.subdiagonal(),
            f,
        })
    }
}

/// The infinite block operator, with coefficient columns produced on demand.
pub struct AugmentedOperator<'a> {
    a: &'a SparseOperator,
    src: &'a GSource,
    family: BasisFamily,
    t0: f64,
    max_columns: usize,
    map: CoefficientMap,
    derivs: DenseMatrix,
    w: Vec<ComplexVector>,
    homogeneous: bool,
}

impl<'a> AugmentedOperator<'a> {
    /// Operator for expansions about `t0` needing at most `max_columns` coefficient columns.
    pub fn new(
        a: &'a SparseOperator,
        src: &'a GSource,
        family: BasisFamily,
        t0: f64,
        max_columns: usize,
    ) -> Result<Self> {
        if src.dim() != a.n() {
            return Err(Error::contract(format!(
                "source dimension {} does not match operator dimension {}",
                src.dim(),
                a.n()
            )));
        }
        Ok(AugmentedOperator {
            a,
            src,
            family,
            t0,
            max_columns,
            map: CoefficientMap::new(family, max_columns)?,
            derivs: DenseMatrix::zeros(a.n(), 0),
            w: Vec::new(),
            homogeneous: src.is_zero(),
        })
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    /// Coefficient column `w_k`.
    pub fn coefficient(&mut self, k: usize) -> Result<&ComplexVector> {
        while self.w.len() <= k {
            let next = self.w.len();
            if next >= self.max_columns {
                return Err(Error::DerivativeOrderUnavailable {
                    requested: next + 1,
                    available: self.max_columns,
                    t0: self.t0,
                });
            }
            if self.derivs.ncols() <= next {
                let want = (2 * self.derivs.ncols()).max(next + 1).min(self.max_columns);
                self.derivs = self.src.derivatives(want, self.t0)?;
            }
            let col = self.map.column(&self.derivs, next);
            self.w.push(col);
        }
        Ok(&self.w[k])
    }

    /// `A_∞ (q; 0)` on its first `q.len() + 1` entries.
    pub fn apply(&mut self, q: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.a.n();
        let tail_len = q.len().checked_sub(n).ok_or_else(|| {
            Error::contract(format!("augmented vector of length {} shorter than {n}", q.len()))
        })?;
        let mut out = vec![ZERO; q.len() + 1];
        self.a.spmv_into(&q[..n], &mut out[..n]);
        if !self.homogeneous {
            for j in 0..tail_len {
                let c = q[n + j];
                if c != ZERO {
                    let wj = self.coefficient(j)?.clone();
                    axpy(c, wj.as_slice(), &mut out[..n]);
                }
            }
        }
        apply_generator(self.family, &q[n..], &mut out[n..]);
        Ok(out)
    }
}

/// One application of the augmented operator with precomputed coefficients.
/// `q` has top block of length `n` and tail length `k`; the result has length
/// `n + k + 1`.
pub fn apply_augmented(
    a: &SparseOperator,
    coeffs: &ExpansionCoefficients,
    family: BasisFamily,
    q: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = a.n();
    if q.len() <= n {
        return Err(Error::contract("apply_augmented: tail must have length at least 1"));
    }
    let k = q.len() - n;
    if coeffs.w.ncols() < k {
        return Err(Error::DerivativeOrderUnavailable {
            requested: k,
            available: coeffs.w.ncols(),
            t0: coeffs.t0,
        });
    }
    if coeffs.w.nrows() != n {
        return Err(Error::contract("apply_augmented: coefficient rows differ from operator dimension"));
    }
    let mut out = vec![ZERO; q.len() + 1];
    a.spmv_into(&q[..n], &mut out[..n]);
    for j in 0..k {
        axpy(q[n + j], coeffs.w.column(j).as_slice(), &mut out[..n]);
    }
    apply_generator(family, &q[n..], &mut out[n..]);
    Ok(out)
}

fn check_common(a: &SparseOperator, u0: &[Complex64], t: f64, n_steps: usize) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::contract(format!("integration time {t} must be finite and non-negative")));
    }
    if n_steps == 0 {
        return Err(Error::contract("Krylov dimension N must be at least 1"));
    }
    if u0.len() != a.n() {
        return Err(Error::contract(format!(
            "initial value has length {}, operator dimension is {}",
            u0.len(),
            a.n()
        )));
    }
    Ok(())
}

/// Starting vector `(u0; e_1)`, or `(u0; 0)` when there is no inhomogeneity
/// so that the run reduces to the standard Krylov method for `exp(tA) u0`.
fn start_vector(u0: &[Complex64], tail: usize, homogeneous: bool) -> Vec<Complex64> {
    let mut b = u0.to_vec();
    b.resize(u0.len() + tail, ZERO);
    if !homogeneous && tail > 0 {
        b[u0.len()] = Complex64::new(1.0, 0.0);
    }
    b
}

/// Approximates `u(t)` for `u' = A u + g`, `u(0) = u0` with an `N`-dimensional
/// Krylov space.
pub fn infinite_arnoldi(
    a: &SparseOperator,
    src: &GSource,
    family: BasisFamily,
    u0: &[Complex64],
    t: f64,
    n_steps: usize,
) -> Result<IntegratorResult> {
    infinite_arnoldi_from(a, src, family, u0, 0.0, t, n_steps)
}

/// As [`infinite_arnoldi`] for the interval `[t0, t0 + h]`, with `g`
/// expanded about `t0`.
pub fn infinite_arnoldi_from(
    a: &SparseOperator,
    src: &GSource,
    family: BasisFamily,
    u0: &[Complex64],
    t0: f64,
    h: f64,
    n_steps: usize,
) -> Result<IntegratorResult> {
    check_common(a, u0, h, n_steps)?;
    let mut op = AugmentedOperator::new(a, src, family, t0, n_steps)?;
    let mut state = ArnoldiState::new(start_vector(u0, 1, op.is_homogeneous()))?;
    for _ in 0..n_steps {
        state.step(|q| op.apply(q))?;
        if state.breakdown() {
            break;
        }
    }
    state.combine(a.n(), h)
}

/// Arnoldi on the explicitly truncated operator `[[A, W_m], [0, H_m]]`
/// started from `(u0; e_1)`.
pub fn truncated_arnoldi(
    a: &SparseOperator,
    coeffs: &ExpansionCoefficients,
    h_m: &DenseMatrix,
    u0: &[Complex64],
    t: f64,
    n_steps: usize,
) -> Result<IntegratorResult> {
    check_common(a, u0, t, n_steps)?;
    let n = a.n();
    let m = h_m.nrows();
    if h_m.ncols() != m || coeffs.w.ncols() != m || coeffs.w.nrows() != n {
        return Err(Error::contract("truncated_arnoldi: inconsistent block sizes"));
    }
    if m < n_steps {
        return Err(Error::contract(format!("truncated_arnoldi: m = {m} < N = {n_steps}")));
    }
    let homogeneous = coeffs.w.iter().all(|v| v.norm() == 0.0);
    let apply = |q: &[Complex64]| -> Result<Vec<Complex64>> {
        let mut out = vec![ZERO; n + m];
        a.spmv_into(&q[..n], &mut out[..n]);
        for j in 0..m {
            axpy(q[n + j], coeffs.w.column(j).as_slice(), &mut out[..n]);
        }
        let tail = h_m * DenseMatrix::from_column_slice(m, 1, &q[n..]);
        out[n..].copy_from_slice(tail.as_slice());
        Ok(out)
    };
    let mut state = ArnoldiState::new(start_vector(u0, m, homogeneous))?;
    for _ in 0..n_steps {
        state.step(apply)?;
        if state.breakdown() {
            break;
        }
    }
    state.combine(n, t)
}

/// Consecutive runs over the steps `h_1, …, h_m`, re-expanding `g` at the
/// start of each. The diagnostics describe the final step; `breakdown` is
/// set if any step broke down.
pub fn integrate_steps(
    a: &SparseOperator,
    src: &GSource,
    family: BasisFamily,
    u0: &[Complex64],
    steps: &[f64],
    n_steps: usize,
) -> Result<IntegratorResult> {
    if steps.is_empty() {
        return Err(Error::contract("integrate_steps: empty step list"));
    }
    if let Some(h) = steps.iter().find(|h| !(**h > 0.0) || !h.is_finite()) {
        return Err(Error::contract(format!("integrate_steps: step {h} must be positive")));
    }
    let mut u = u0.to_vec();
    let mut t0 = 0.0;
    let mut any_breakdown = false;
    let mut last = None;
    for &h in steps {
        let r = infinite_arnoldi_from(a, src, family, &u, t0, h, n_steps)?;
        any_breakdown |= r.breakdown;
        u = r.u.as_slice().to_vec();
        t0 += h;
        last = Some(r);
    }
    let mut r = last.expect("non-empty steps");
    r.breakdown = any_breakdown;
    Ok(r)
}

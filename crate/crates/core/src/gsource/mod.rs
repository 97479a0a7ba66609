// SPDX-License-Identifier: Apache-2.0

//! Inhomogeneities `g(t)` and their derivative columns
//! `G = [g(t0), g'(t0), …, g^{(N−1)}(t0)]`.

mod expr;
mod series;

pub use expr::{Expr, MAX_DEPTH};
pub use series::Series;

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_complex::Complex64;

use crate::basis::{hessenberg, BasisFamily};
use crate::error::{Error, Result};
use crate::linalg::{ComplexVector, DenseMatrix};

/// Highest number of derivative columns; `170!` is the largest finite factorial.
pub const MAX_COLUMNS: usize = 171;

/// One term `p(t) v` of a separable source.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTerm {
    pub profile: Expr,
    pub direction: ComplexVector,
}

impl ProfileTerm {
    pub fn new(profile: Expr, direction: ComplexVector) -> Self {
        ProfileTerm { profile, direction }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceKind {
    /// `g(t) = Σ_j p_j(t) v_j`, derivatives by truncated Taylor arithmetic.
    Separable { dim: usize, terms: Vec<ProfileTerm> },
    /// Caller-supplied columns `g^{(ℓ)}(t0)` at a single point.
    Explicit { t0: f64, columns: DenseMatrix },
    /// Same representation as `Separable`, but derivatives are read off
    /// `p(t0 I + J) e_1` for the lower shift matrix `J`.
    Jordan { dim: usize, terms: Vec<ProfileTerm> },
}

/// An inhomogeneity together with a per-point cache of derivative columns.
pub struct GSource {
    kind: SourceKind,
    cache: Mutex<HashMap<u64, DenseMatrix>>,
}

impl fmt::Debug for GSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GSource").field("kind", &self.kind).finish_non_exhaustive()
    }
}

impl Clone for GSource {
    fn clone(&self) -> Self {
        GSource::from_kind(self.kind.clone())
    }
}

fn check_terms(dim: usize, terms: &[ProfileTerm]) -> Result<()> {
    for (j, term) in terms.iter().enumerate() {
        if term.direction.len() != dim {
            return Err(Error::contract(format!(
                "source term {j}: direction has length {}, expected {dim}",
                term.direction.len()
            )));
        }
        if term.direction.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::contract(format!("source term {j}: non-finite direction")));
        }
    }
    Ok(())
}

impl GSource {
    fn from_kind(kind: SourceKind) -> Self {
        GSource {
            kind,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn separable(dim: usize, terms: Vec<ProfileTerm>) -> Result<Self> {
        check_terms(dim, &terms)?;
        Ok(Self::from_kind(SourceKind::Separable { dim, terms }))
    }

    /// `g ≡ 0` in dimension `dim`.
    pub fn zero(dim: usize) -> Self {
        Self::from_kind(SourceKind::Separable {
            dim,
            terms: Vec::new(),
        })
    }

    pub fn explicit(t0: f64, columns: DenseMatrix) -> Result<Self> {
        if columns.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::contract("explicit derivative table has non-finite entries"));
        }
        Ok(Self::from_kind(SourceKind::Explicit { t0, columns }))
    }

    pub fn jordan(dim: usize, terms: Vec<ProfileTerm>) -> Result<Self> {
        check_terms(dim, &terms)?;
        Ok(Self::from_kind(SourceKind::Jordan { dim, terms }))
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            SourceKind::Separable { dim, .. } | SourceKind::Jordan { dim, .. } => *dim,
            SourceKind::Explicit { columns, .. } => columns.nrows(),
        }
    }

    /// Terms of a profile-based source; empty for explicit tables.
    pub fn terms(&self) -> &[ProfileTerm] {
        match &self.kind {
            SourceKind::Separable { terms, .. } | SourceKind::Jordan { terms, .. } => terms,
            SourceKind::Explicit { .. } => &[],
        }
    }

    /// True when `g` vanishes identically by construction.
    pub fn is_zero(&self) -> bool {
        match &self.kind {
            SourceKind::Separable { terms, .. } | SourceKind::Jordan { terms, .. } => terms
                .iter()
                .all(|t| t.profile.is_zero_literal() || t.direction.iter().all(|v| v.norm() == 0.0)),
            SourceKind::Explicit { columns, .. } => columns.iter().all(|v| v.norm() == 0.0),
        }
    }

    /// `g(t)`. Explicit tables are evaluated as their Taylor polynomial.
    pub fn eval(&self, t: f64) -> ComplexVector {
        self.eval_complex(Complex64::new(t, 0.0))
    }

    /// `g(z)` at a complex point; explicit tables use their Taylor polynomial.
    pub fn eval_complex(&self, z: Complex64) -> ComplexVector {
        let one = Complex64::new(1.0, 0.0);
        let mut out = ComplexVector::zeros(self.dim());
        match &self.kind {
            SourceKind::Separable { terms, .. } | SourceKind::Jordan { terms, .. } => {
                for term in terms {
                    out.axpy(term.profile.eval(z), &term.direction, one);
                }
            }
            SourceKind::Explicit { t0, columns } => {
                let mut scale = one;
                for (l, col) in columns.column_iter().enumerate() {
                    if l > 0 {
                        scale *= (z - t0) / l as f64;
                    }
                    out.axpy(scale, &col, one);
                }
            }
        }
        out
    }

    /// Columns `g^{(ℓ)}(t0)`, `ℓ = 0..n`, memoized per expansion point.
    pub fn derivatives(&self, n: usize, t0: f64) -> Result<DenseMatrix> {
        let key = t0.to_bits();
        {
            let cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
            if let Some(g) = cache.get(&key) {
                if g.ncols() >= n {
                    return Ok(g.columns(0, n).into_owned());
                }
            }
        }
        let g = self.compute(n, t0)?;
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        let slot = cache.entry(key).or_insert_with(|| g.clone());
        if slot.ncols() < g.ncols() {
            *slot = g.clone();
        }
        Ok(g)
    }

    fn compute(&self, n: usize, t0: f64) -> Result<DenseMatrix> {
        if n == 0 {
            return Err(Error::contract("derivative columns: N must be at least 1"));
        }
        if !t0.is_finite() {
            return Err(Error::contract(format!("derivative columns: t0 = {t0}")));
        }
        let g = match &self.kind {
            SourceKind::Explicit { t0: at, columns } => {
                if *at != t0 || columns.ncols() < n {
                    return Err(Error::DerivativeOrderUnavailable {
                        requested: n,
                        available: if *at == t0 { columns.ncols() } else { 0 },
                        t0,
                    });
                }
                return Ok(columns.columns(0, n).into_owned());
            }
            SourceKind::Separable { dim, terms } => {
                check_order(n)?;
                let mut g = DenseMatrix::zeros(*dim, n);
                for term in terms {
                    let coeffs = term.profile.taylor(t0, n).0;
                    accumulate(&mut g, &coeffs, &term.direction, true);
                }
                g
            }
            SourceKind::Jordan { dim, terms } => {
                check_order(n)?;
                let mut g = DenseMatrix::zeros(*dim, n);
                for term in terms {
                    let col = jordan_column(&term.profile, n, t0)?;
                    accumulate(&mut g, col.as_slice(), &term.direction, true);
                }
                g
            }
        };
        if g.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NumericOverflow(format!(
                "derivative columns of g at t0 = {t0} are not finite for N = {n}"
            )));
        }
        Ok(g)
    }
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_COLUMNS {
        return Err(Error::contract(format!(
            "N = {n} derivative columns exceed {MAX_COLUMNS}: factorial scaling overflows"
        )));
    }
    Ok(())
}

/// `g[:, ℓ] += ℓ! c_ℓ v` (or `c_ℓ v` without scaling).
fn accumulate(g: &mut DenseMatrix, coeffs: &[Complex64], v: &ComplexVector, factorial: bool) {
    let mut f = 1.0;
    for (l, c) in coeffs.iter().enumerate() {
        if factorial && l > 0 {
            f *= l as f64;
        }
        let s = c * f;
        if s != Complex64::new(0.0, 0.0) {
            g.column_mut(l).axpy(s, v, Complex64::new(1.0, 0.0));
        }
    }
}

/// `p(t0 I + J) e_1 = (p(t0), p'(t0), p''(t0)/2!, …, p^{(n−1)}(t0)/(n−1)!)`.
pub fn jordan_column(profile: &Expr, n: usize, t0: f64) -> Result<ComplexVector> {
    let shift = hessenberg(BasisFamily::Monomial, n)?;
    let m = shift + DenseMatrix::from_diagonal_element(n, n, Complex64::new(t0, 0.0));
    Ok(profile.eval_matrix(&m)?.column(0).into_owned())
}

/// Derivative columns of `src` at `t0`.
pub fn g_derivatives(src: &GSource, n: usize, t0: f64) -> Result<DenseMatrix> {
    src.derivatives(n, t0)
}

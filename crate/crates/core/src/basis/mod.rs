// SPDX-License-Identifier: Apache-2.0

//! Basis-function families and the maps between derivative data and
//! expansion coefficients.
//!
//! Each family `φ_0, φ_1, …` satisfies `φ̄'(t) = H_∞ φ̄(t)`, `φ̄(0) = e_1`
//! with a lower Hessenberg `H_∞`:
//!
//! | family | `φ_ℓ(t)` | `H_∞` |
//! |---|---|---|
//! | [`BasisFamily::Monomial`] | `t^ℓ/ℓ!` | ones on the subdiagonal |
//! | [`BasisFamily::BesselJ`] | `J_ℓ(t)` | `(0, −1)` in row 0, then `½` below and `−½` above the diagonal |
//! | [`BasisFamily::BesselI`] | `I_ℓ(t)` | `(0, 1)` in row 0, then `½` below and `½` above the diagonal |

mod bessel;
mod chebyshev;

pub use chebyshev::{chebyshev_coeffs, ChebyshevCoeffTable, MAX_DEGREE as MAX_CHEBYSHEV_DEGREE};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dense_expm, ComplexVector, DenseMatrix, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisFamily {
    Monomial,
    BesselJ,
    BesselI,
}

impl BasisFamily {
    pub const ALL: [BasisFamily; 3] = [
        BasisFamily::Monomial,
        BasisFamily::BesselJ,
        BasisFamily::BesselI,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasisFamily::Monomial => "monomial",
            BasisFamily::BesselJ => "besselj",
            BasisFamily::BesselI => "besseli",
        }
    }

    /// Entry `H[i+1, i]`.
    pub fn subdiagonal(self, _i: usize) -> f64 {
        match self {
            BasisFamily::Monomial => 1.0,
            BasisFamily::BesselJ | BasisFamily::BesselI => 0.5,
        }
    }

    /// Entry `H[i, i+1]`.
    pub fn superdiagonal(self, i: usize) -> f64 {
        let s = match self {
            BasisFamily::Monomial => return 0.0,
            BasisFamily::BesselJ => -1.0,
            BasisFamily::BesselI => 1.0,
        };
        if i == 0 {
            s
        } else {
            0.5 * s
        }
    }

    /// Coefficient `c` in `φ̄_N' = H_N φ̄_N + c φ_N e_N`, the coupling to the
    /// first function left out of a truncation.
    pub fn tail_coupling(self) -> f64 {
        match self {
            BasisFamily::Monomial => 0.0,
            BasisFamily::BesselJ => -0.5,
            BasisFamily::BesselI => 0.5,
        }
    }
}

impl fmt::Display for BasisFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "monomial" | "mono" => Ok(BasisFamily::Monomial),
            "besselj" | "bessel" | "j" => Ok(BasisFamily::BesselJ),
            "besseli" | "i" => Ok(BasisFamily::BesselI),
            other => Err(Error::contract(format!("unknown basis family '{other}'"))),
        }
    }
}

/// Leading `n × n` block of the family's generator.
pub fn hessenberg(family: BasisFamily, n: usize) -> Result<DenseMatrix> {
    if n == 0 {
        return Err(Error::contract("hessenberg: N must be at least 1"));
    }
    let mut h = DenseMatrix::zeros(n, n);
    for i in 0..n - 1 {
        h[(i + 1, i)] = Complex64::new(family.subdiagonal(i), 0.0);
        h[(i, i + 1)] = Complex64::new(family.superdiagonal(i), 0.0);
    }
    Ok(h)
}

/// `out = H_∞ (q; 0)` restricted to its first `q.len() + 1` entries, which
/// are the only ones that can be nonzero.
pub fn apply_generator(family: BasisFamily, q: &[Complex64], out: &mut [Complex64]) {
    let k = q.len();
    debug_assert_eq!(out.len(), k + 1);
    for (i, o) in out.iter_mut().enumerate() {
        let mut v = ZERO;
        if i > 0 {
            v += q[i - 1] * family.subdiagonal(i - 1);
        }
        if i + 1 < k {
            v += q[i + 1] * family.superdiagonal(i);
        }
        *o = v;
    }
}

/// `(φ_0(t), …, φ_{n−1}(t))`.
pub fn eval_basis(family: BasisFamily, n: usize, t: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::contract("eval_basis: N must be at least 1"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::contract(format!("eval_basis: t = {t} must be finite and non-negative")));
    }
    Ok(match family {
        BasisFamily::Monomial => {
            let mut v = Vec::with_capacity(n);
            let mut term = 1.0;
            for l in 0..n {
                if l > 0 {
                    term *= t / l as f64;
                }
                v.push(term);
            }
            v
        }
        BasisFamily::BesselJ => bessel::sequence(bessel::Kind::J, n, t),
        BasisFamily::BesselI => bessel::sequence(bessel::Kind::I, n, t),
    })
}

/// `[e_1, H e_1, …, H^{n−1} e_1]`, upper triangular for Hessenberg `H`.
pub fn krylov_matrix(h: &DenseMatrix, n: usize) -> Result<DenseMatrix> {
    if h.nrows() != n || h.ncols() != n || n == 0 {
        return Err(Error::contract(format!(
            "krylov_matrix: expected a {n}x{n} matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let mut k = DenseMatrix::zeros(n, n);
    let mut col = ComplexVector::zeros(n);
    col[0] = ONE;
    for j in 0..n {
        if j > 0 {
            col = h * &col;
        }
        k.set_column(j, &col);
    }
    Ok(k)
}

/// Weights `c_{k,ℓ}` with `w_k = Σ_ℓ c_{k,ℓ} g^{(ℓ)}(t0)`, i.e. the entries of
/// the inverse Krylov matrix of the family's generator.
#[derive(Debug, Clone)]
pub struct CoefficientMap {
    family: BasisFamily,
    table: Option<ChebyshevCoeffTable>,
}

impl CoefficientMap {
    /// Map able to produce columns `0..n`.
    pub fn new(family: BasisFamily, n: usize) -> Result<Self> {
        let table = match family {
            BasisFamily::Monomial => None,
            _ => Some(chebyshev_coeffs(n.saturating_sub(1))?),
        };
        Ok(CoefficientMap { family, table })
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    /// Number of columns this map can produce.
    pub fn capacity(&self) -> usize {
        self.table.as_ref().map_or(usize::MAX, |t| t.degree() + 1)
    }

    pub fn weight(&self, k: usize, l: usize) -> f64 {
        let Some(table) = &self.table else {
            return if k == l { 1.0 } else { 0.0 };
        };
        if l > k {
            return 0.0;
        }
        if k == 0 {
            return 1.0;
        }
        let c = table.get(k, l);
        match self.family {
            BasisFamily::BesselJ => 2.0 * c.abs(),
            _ => 2.0 * c,
        }
    }

    /// Column `k` of `W` from the derivative columns `g` (at least `k + 1`).
    pub fn column(&self, g: &DenseMatrix, k: usize) -> ComplexVector {
        let mut w = ComplexVector::zeros(g.nrows());
        for l in 0..=k {
            let c = self.weight(k, l);
            if c != 0.0 {
                w.axpy(Complex64::new(c, 0.0), &g.column(l), ONE);
            }
        }
        w
    }

    /// `K_N^{-1}` for the family's generator, assembled from the weights.
    pub fn inverse_krylov(&self, n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, |l, k| Complex64::new(self.weight(k, l), 0.0))
    }
}

/// Coefficient columns `w_0..w_{N−1}` of `g(t0 + s) = Σ_ℓ w_ℓ φ_ℓ(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoefficients {
    pub w: DenseMatrix,
    pub family: BasisFamily,
    pub t0: f64,
}

/// Applies the closed-form coefficient map to derivative columns
/// `g(t0), g'(t0), …` stored in `g`.
pub fn expansion_coeffs(family: BasisFamily, g: &DenseMatrix, t0: f64) -> Result<ExpansionCoefficients> {
    if g.iter().any(|v| v.re.is_nan() || v.im.is_nan()) {
        return Err(Error::contract("expansion_coeffs: derivative matrix contains NaN"));
    }
    let n = g.ncols();
    let map = CoefficientMap::new(family, n)?;
    let mut w = DenseMatrix::zeros(g.nrows(), n);
    for k in 0..n {
        w.set_column(k, &map.column(g, k));
    }
    Ok(ExpansionCoefficients { w, family, t0 })
}

/// `φ̄_N(t) − exp(t H_N) e_1`.
pub fn basis_residual(family: BasisFamily, n: usize, t: f64) -> Result<Vec<f64>> {
    let phi = eval_basis(family, n, t)?;
    let e = dense_expm(&(hessenberg(family, n)? * Complex64::new(t, 0.0)))?;
    Ok(phi.iter().zip(e.column(0).iter()).map(|(p, q)| p - q.re).collect())
}

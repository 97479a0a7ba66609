// SPDX-License-Identifier: Apache-2.0

//! Computable error bounds and the convergence indicator.
//!
//! Factorials and powers are combined in log space and exponentiated last,
//! so every bound stays finite for Krylov dimensions in the hundreds.

use std::f64::consts::{LN_2, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{hessenberg, BasisFamily};
use crate::error::{Error, Result};
use crate::gsource::GSource;
use crate::linalg::{condition_number, dense_expm, log_norm, norm2, spectral_norm, DenseMatrix, LinearOperator};

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `R` used by [`BoundReport`] for the element-wise bound.
pub fn default_radius(t: f64) -> f64 {
    (t + 1.0).max(2.0 * t)
}

/// Bound on `‖φ̄_N(t) − exp(tH_N) e_1‖` for both Bessel families:
/// `(t/2)^N / (N+1)! · √2 · t · e^t`.
pub fn truncation_bound_bessel(n: usize, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let ln = n as f64 * (0.5 * t).ln() - ln_factorial(n + 1) + 0.5 * LN_2 + t.ln() + t;
    ln.exp()
}

/// Bound on entry `k` (1-based) of `φ̄_N(t) − exp(tH_N) e_1`:
///
/// ```text
/// e^t C(R) t^{2N−k+1} (N−k)! / ((2R)^{N−k} 2^N (2N−k+1)!)
/// ```
///
/// with `C(R) = max(‖exp(tH_N)‖, 2√2 e^{R + 1/(4R)} / (1 − t/(2R)))`. For
/// `R = t²` this is `e^t C(t²) t^{k+1} 2^{−(2N−k)} (N−k)!/(2N−k+1)!`; the
/// same quantity with `t^k` in place of `t^{k+1}` is what a looser reading
/// of that expression would give. The scaled monomials have no truncation
/// error, so their bound is zero.
pub fn eps_elementwise_bound(family: BasisFamily, n: usize, k: usize, t: f64, r: f64) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::contract(format!("element bound: need 1 <= k <= N, got k = {k}, N = {n}")));
    }
    check_radius(t, r)?;
    if family == BasisFamily::Monomial || t == 0.0 {
        return Ok(0.0);
    }
    Ok(element_bound_with(element_constant(family, n, t, r)?.ln(), n, k, t, r))
}

/// [`eps_elementwise_bound`] for `k = 1..=N`, sharing the constant `C(R)`.
pub fn eps_elementwise_bounds(family: BasisFamily, n: usize, t: f64, r: f64) -> Result<Vec<f64>> {
    check_radius(t, r)?;
    if family == BasisFamily::Monomial || t == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let ln_c = element_constant(family, n, t, r)?.ln();
    Ok((1..=n).map(|k| element_bound_with(ln_c, n, k, t, r)).collect())
}

fn check_radius(t: f64, r: f64) -> Result<()> {
    if !(r > t) || !r.is_finite() {
        return Err(Error::contract(format!("element bound: R = {r} must exceed t = {t}")));
    }
    Ok(())
}

fn element_bound_with(ln_c: f64, n: usize, k: usize, t: f64, r: f64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    let ln = t + ln_c + (2.0 * nf - kf + 1.0) * t.ln() + ln_factorial(n - k)
        - (nf - kf) * (2.0 * r).ln()
        - nf * LN_2
        - ln_factorial(2 * n - k + 1);
    ln.exp()
}

fn element_constant(family: BasisFamily, n: usize, t: f64, r: f64) -> Result<f64> {
    let lambda = t / (2.0 * r);
    let analytic = 2.0 * SQRT_2 * (r + 0.25 / r).exp() / (1.0 - lambda);
    let h = hessenberg(family, n)?;
    let measured = spectral_norm(&dense_expm(&(h * Complex64::new(t, 0.0)))?);
    Ok(analytic.max(measured))
}

/// Bounds on `‖w_k‖`, `k = 0..count`, from `M_t = max_{|λ|=t} ‖g(λ)‖`.
///
/// Bessel families: `M_t k! (2/t)^k` for `t < 2`; for `t ≥ 2`, `M_t k!`,
/// tightened to `2 M_t k! (2/t)^k` once `k > t²/2 + 1`. Scaled monomials:
/// the Cauchy estimate `M_t k! / t^k`. Values beyond the f64 range saturate
/// at `f64::MAX`; [`wk_growth_log_bounds`] has the exact logarithms.
pub fn wk_growth_bounds(family: BasisFamily, m_t: f64, t: f64, count: usize) -> Result<Vec<f64>> {
    Ok(wk_growth_log_bounds(family, m_t, t, count)?
        .into_iter()
        .map(|l| l.exp().min(f64::MAX))
        .collect())
}

/// Natural logarithms of [`wk_growth_bounds`].
pub fn wk_growth_log_bounds(family: BasisFamily, m_t: f64, t: f64, count: usize) -> Result<Vec<f64>> {
    if !(m_t > 0.0) || !(t > 0.0) {
        return Err(Error::contract(format!("w_k bounds need M_t > 0 and t > 0, got {m_t}, {t}")));
    }
    let ln_m = m_t.ln();
    let ln_two_over_t = (2.0 / t).ln();
    Ok((0..count)
        .map(|k| {
            let kf = k as f64;
            let base = ln_m + ln_factorial(k);
            match family {
                BasisFamily::Monomial => base - kf * t.ln(),
                _ if t < 2.0 => base + kf * ln_two_over_t,
                _ if kf > 0.5 * t * t + 1.0 => base.min(base + LN_2 + kf * ln_two_over_t),
                _ => base,
            }
        })
        .collect())
}

/// `max(1, e^μ) / ℓ!` with `μ` the logarithmic norm of `a`.
pub fn phi_norm_bound(ell: usize, a: &dyn LinearOperator) -> Result<f64> {
    phi_norm_bound_from(ell, log_norm(a)?)
}

/// [`phi_norm_bound`] for a known logarithmic norm.
pub fn phi_norm_bound_from(ell: usize, mu: f64) -> Result<f64> {
    if ell == 0 {
        return Err(Error::contract("phi bound: ell must be at least 1"));
    }
    Ok((mu.max(0.0) - ln_factorial(ell)).exp())
}

/// Bound `2 √N (1 + √2)^N` on `‖K_N^{-1} H_N^k e_1‖` for `k ≥ N`.
pub fn tail_bound(n: usize) -> f64 {
    let nf = n as f64;
    (LN_2 + 0.5 * nf.ln() + nf * (1.0 + SQRT_2).ln()).exp()
}

/// Eigenvector matrix of a Bessel generator, built from Chebyshev
/// polynomials at the zeros of `T_N`, and its eigenvalues.
pub fn bessel_eigenvectors(family: BasisFamily, n: usize) -> Result<(DenseMatrix, Vec<Complex64>)> {
    if family == BasisFamily::Monomial || n < 2 {
        return Err(Error::contract("eigenvector structure needs a Bessel family and N >= 2"));
    }
    let zeros: Vec<f64> = (0..n)
        .map(|k| (std::f64::consts::PI * (2 * k + 1) as f64 / (2 * n) as f64).cos())
        .collect();
    let mut v = DenseMatrix::zeros(n, n);
    for (k, &x) in zeros.iter().enumerate() {
        let (mut prev, mut cur) = (1.0, x);
        for i in 0..n {
            let value = if i == 0 { 1.0 } else { cur };
            if i > 0 {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            // rows of the J generator pick up (−i)^i
            let phase = match family {
                BasisFamily::BesselJ => Complex64::new(0.0, -1.0).powu(i as u32),
                _ => Complex64::new(1.0, 0.0),
            };
            v[(i, k)] = phase * value;
        }
    }
    let eig = zeros
        .iter()
        .map(|&x| match family {
            BasisFamily::BesselJ => Complex64::new(0.0, x),
            _ => Complex64::new(x, 0.0),
        })
        .collect();
    Ok((v, eig))
}

/// `(κ₂(V), max_τ ‖exp(τH_N)‖ / e^{τα})` over `τ ∈ [0, 10]`, where `α` is
/// the spectral abscissa of `H_N`.
pub fn conditioning_check(family: BasisFamily, n: usize) -> Result<(f64, f64)> {
    conditioning_check_on(family, n, 10.0, 101)
}

pub fn conditioning_check_on(family: BasisFamily, n: usize, t_max: f64, points: usize) -> Result<(f64, f64)> {
    let (v, eig) = bessel_eigenvectors(family, n)?;
    let kappa = condition_number(&v);
    let alpha = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let h = hessenberg(family, n)?;
    let mut worst: f64 = 0.0;
    for i in 0..points.max(2) {
        let tau = t_max * i as f64 / (points.max(2) - 1) as f64;
        let e = dense_expm(&(&h * Complex64::new(tau, 0.0)))?;
        worst = worst.max(spectral_norm(&e) / (tau * alpha).exp());
    }
    Ok((kappa, worst))
}

/// `|‖F^N‖^{1/N} / ρ − 1|` with the power formed by scaled repeated squaring.
pub fn convergence_indicator(f: &DenseMatrix, rho: f64) -> Result<f64> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::contract(format!("indicator: spectral radius {rho} must be positive")));
    }
    let n = f.nrows();
    if n == 0 || f.ncols() != n {
        return Err(Error::contract("indicator: F must be square and non-empty"));
    }
    let ln_norm = ln_power_norm(f, n);
    Ok(((ln_norm / n as f64).exp() / rho - 1.0).abs())
}

/// `ln ‖M^p‖₂`, `−∞` if the power vanishes.
fn ln_power_norm(m: &DenseMatrix, p: usize) -> f64 {
    let normalize = |x: DenseMatrix| -> Option<(f64, DenseMatrix)> {
        let s = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
        (s > 0.0 && s.is_finite()).then(|| (s.ln(), x / Complex64::new(s, 0.0)))
    };
    let Some((mut base_ln, mut base)) = normalize(m.clone()) else {
        return f64::NEG_INFINITY;
    };
    let mut acc: Option<(f64, DenseMatrix)> = None;
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = match acc {
                None => Some((base_ln, base.clone())),
                Some((l, a)) => match normalize(&a * &base) {
                    Some((s, a)) => Some((l + base_ln + s, a)),
                    None => return f64::NEG_INFINITY,
                },
            };
        }
        e >>= 1;
        if e > 0 {
            match normalize(&base * &base) {
                Some((s, b)) => {
                    base_ln = 2.0 * base_ln + s;
                    base = b;
                }
                None => return f64::NEG_INFINITY,
            }
        }
    }
    let (l, a) = acc.expect("p >= 1");
    l + spectral_norm(&a).ln()
}

/// Samples `‖g(λ)‖` on `|λ| = t` at `samples` equispaced points.
pub fn estimate_m_t(src: &GSource, t: f64, samples: usize) -> f64 {
    (0..samples.max(1))
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / samples.max(1) as f64;
            norm2(src.eval_complex(Complex64::from_polar(t, theta)).as_slice())
        })
        .fold(0.0, f64::max)
}

/// `max_ℓ ‖g^{(ℓ)}‖ / ‖A‖^ℓ` over the given derivative columns.
pub fn growth_constant(g: &DenseMatrix, norm_a: f64) -> f64 {
    g.column_iter()
        .enumerate()
        .map(|(l, col)| {
            let c = norm2(col.as_slice());
            if c == 0.0 {
                0.0
            } else {
                (c.ln() - l as f64 * norm_a.ln()).exp()
            }
        })
        .fold(0.0, f64::max)
}

/// Inputs that depend on the problem rather than on the basis.
#[derive(Debug, Clone, Copy)]
pub struct BoundInputs {
    pub family: BasisFamily,
    pub n: usize,
    pub t: f64,
    /// `max_{|λ|=t} ‖g(λ)‖`.
    pub m_t: f64,
    /// Logarithmic norm of `A`.
    pub mu: f64,
    /// Growth constant of the derivative columns, if known.
    pub growth: Option<f64>,
    /// Convergence indicator of the run, if known.
    pub indicator: Option<f64>,
}

/// All diagnostics for one `(family, N, t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub family: BasisFamily,
    #[serde(rename = "N")]
    pub n: usize,
    pub t: f64,
    pub truncation_bound: f64,
    pub eps_elementwise: Vec<f64>,
    pub wk_bounds: Vec<f64>,
    /// Bound on `‖φ_N(tA)‖`.
    pub phi_bound: f64,
    pub tail_bound: f64,
    pub kappa_v: f64,
    pub exp_h_bound: f64,
    pub growth_constant: Option<f64>,
    pub indicator: Option<f64>,
}

pub const CSV_HEADER: &str = "family,N,t,truncation_bound,eps_elementwise_max,wk_bound_max,phi_bound,tail_bound,kappa_V,expH_bound,growth_constant,indicator";

impl BoundReport {
    pub fn compute(input: &BoundInputs) -> Result<Self> {
        let BoundInputs { family, n, t, .. } = *input;
        if n == 0 || !(t >= 0.0) {
            return Err(Error::contract("bound report needs N >= 1 and t >= 0"));
        }
        let r = default_radius(t);
        let bessel = family != BasisFamily::Monomial;
        let truncation_bound = if bessel { truncation_bound_bessel(n, t) } else { 0.0 };
        let eps_elementwise = eps_elementwise_bounds(family, n, t, r)?;
        let wk_bounds = if t > 0.0 && input.m_t > 0.0 {
            wk_growth_bounds(family, input.m_t, t, n)?
        } else {
            vec![0.0; n]
        };
        let (kappa_v, exp_h_bound) = if bessel && n >= 2 {
            conditioning_check_on(family, n, t.max(1e-300), 21)?
        } else {
            (1.0, 1.0)
        };
        Ok(BoundReport {
            family,
            n,
            t,
            truncation_bound,
            eps_elementwise,
            wk_bounds,
            phi_bound: phi_norm_bound_from(n, t * input.mu)?,
            tail_bound: tail_bound(n),
            kappa_v,
            exp_h_bound,
            growth_constant: input.growth,
            indicator: input.indicator,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report fields serialize")
    }

    /// One CSV record matching [`CSV_HEADER`].
    pub fn csv_row(&self) -> String {
        let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
        format!(
            "{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{}",
            self.family,
            self.n,
            self.t,
            self.truncation_bound,
            max(&self.eps_elementwise),
            max(&self.wk_bounds),
            self.phi_bound,
            self.tail_bound,
            self.kappa_v,
            self.exp_h_bound,
            opt(self.growth_constant),
            opt(self.indicator),
        )
    }

    /// True when every bound field is finite and non-negative.
    pub fn is_well_formed(&self) -> bool {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        [self.truncation_bound, self.phi_bound, self.tail_bound, self.kappa_v, self.exp_h_bound]
            .into_iter()
            .chain(self.eps_elementwise.iter().copied())
            .chain(self.wk_bounds.iter().copied())
            .all(ok)
    }
}

// SPDX-License-Identifier: Apache-2.0

//! Seeded numerical checks of the structural identities and the error
//! bounds, reported as pass/fail records.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::{
    basis_residual, eval_basis, expansion_coeffs, hessenberg, krylov_matrix, BasisFamily, CoefficientMap,
};
use crate::bounds::{
    estimate_m_t, phi_norm_bound, tail_bound, truncation_bound_bessel, wk_growth_bounds,
};
use crate::error::Result;
use crate::gsource::{Expr, GSource, ProfileTerm};
use crate::integrator::{infinite_arnoldi, truncated_arnoldi};
use crate::linalg::{dense_expm, norm2, phi_matrix, spectral_norm, ComplexVector, DenseMatrix, SparseOperator};

/// Randomized truncation-equivalence problems per run.
pub const EQUIVALENCE_CASES: usize = 20;
const GROWTH_CASES: usize = 48;
const PHI_CASES: usize = 40;

/// Outcome of one family of checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    /// Largest deviation (or bound ratio) observed.
    pub worst: f64,
    pub tolerance: f64,
    pub violations: usize,
}

impl Check {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Check { name, cases: 0, worst: 0.0, tolerance, violations: 0 }
    }

    /// Records a deviation that must not exceed the tolerance.
    fn record(&mut self, deviation: f64) {
        self.cases += 1;
        if deviation.is_nan() || deviation > self.worst {
            self.worst = deviation;
        }
        if !(deviation <= self.tolerance) {
            self.violations += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.cases > 0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report fields serialize")
    }

    /// One line per check.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {}: {} cases, worst {:.3e}, tolerance {:.1e}, {} violations",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.cases,
                c.worst,
                c.tolerance,
                c.violations
            );
        }
        out
    }
}

fn random_complex(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(n, |_, _| random_complex(rng, 1.0));
    let nrm = v.norm();
    v / Complex64::new(nrm, 0.0)
}

fn random_source(rng: &mut ChaCha8Rng, n: usize) -> Result<GSource> {
    let freq = rng.random_range(0.2..1.5);
    let decay = random_complex(rng, 0.6);
    GSource::separable(
        n,
        vec![
            ProfileTerm::new(Expr::sin(Expr::mul(vec![Expr::constant(freq, 0.0), Expr::T])), random_vector(rng, n)),
            ProfileTerm::new(Expr::exp(Expr::mul(vec![Expr::constant(decay.re, decay.im), Expr::T])), random_vector(rng, n)),
        ],
    )
}

fn max_abs(m: &DenseMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// `K_N^{-1}` from a triangular solve against the closed-form table.
fn krylov_inverse_check(max_n: usize) -> Result<Check> {
    let mut check = Check::new("chebyshev-krylov-inverse", 1e-8);
    for family in BasisFamily::ALL {
        for n in 1..=max_n {
            let k = krylov_matrix(&hessenberg(family, n)?, n)?;
            let solved = k
                .solve_upper_triangular(&DenseMatrix::identity(n, n))
                .expect("Krylov matrix has a nonzero diagonal");
            let table = CoefficientMap::new(family, n)?.inverse_krylov(n);
            check.record(max_abs(&(solved - &table)) / max_abs(&table));
        }
    }
    Ok(check)
}

fn truncation_equivalence_check(max_n: usize, rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut check = Check::new("truncation-equivalence", 1e-10);
    let t = 0.9;
    for _ in 0..EQUIVALENCE_CASES {
        let n = rng.random_range(1..=30);
        let n_steps = rng.random_range(1..=max_n.clamp(1, 12));
        let family = BasisFamily::ALL[rng.random_range(0..3)];
        let trips: Vec<_> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, random_complex(rng, 1.0)))
            .collect();
        let a = SparseOperator::from_triplets(n, &trips)?;
        let src = random_source(rng, n)?;
        let u0 = random_vector(rng, n);
        let ia = infinite_arnoldi(&a, &src, family, u0.as_slice(), t, n_steps)?;
        for m in [n_steps, n_steps + 3, 2 * n_steps] {
            let coeffs = expansion_coeffs(family, &src.derivatives(m, 0.0)?, 0.0)?;
            let tr = truncated_arnoldi(&a, &coeffs, &hessenberg(family, m)?, u0.as_slice(), t, n_steps)?;
            check.record((&ia.u - &tr.u).norm() / ia.u.norm());
        }
    }
    Ok(check)
}

fn monomial_exactness_check(max_n: usize) -> Result<Check> {
    let mut check = Check::new("monomial-exactness", 1e-12);
    for n in 1..=max_n {
        for t in [0.5, 1.0, 2.0] {
            let phi = eval_basis(BasisFamily::Monomial, n, t)?;
            let e = dense_expm(&(hessenberg(BasisFamily::Monomial, n)? * Complex64::new(t, 0.0)))?;
            let diff: Vec<_> = phi.iter().zip(e.column(0).iter()).map(|(p, q)| Complex64::new(*p, 0.0) - q).collect();
            check.record(norm2(&diff));
        }
    }
    Ok(check)
}

fn neumann_check() -> Result<Check> {
    let mut check = Check::new("neumann-exp-expansion", 1e-10);
    let n = 30;
    let ones = DenseMatrix::from_element(1, n, Complex64::new(1.0, 0.0));
    let w = expansion_coeffs(BasisFamily::BesselI, &ones, 0.0)?.w;
    for (k, v) in w.iter().enumerate() {
        let want = if k == 0 { 1.0 } else { 2.0 };
        check.record((v - Complex64::new(want, 0.0)).norm());
    }
    for t in [0.5, 1.0, 2.0] {
        let phi = eval_basis(BasisFamily::BesselI, n, t)?;
        let sum: f64 = phi.iter().zip(w.iter()).map(|(p, c)| p * c.re).sum();
        check.record((sum - t.exp()).abs() / t.exp());
    }
    Ok(check)
}

/// Identity checks up to Krylov dimension `max_n`.
pub fn verify_lemmas(max_n: usize, seed: u64) -> Result<VerifyReport> {
    let max_n = max_n.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(VerifyReport {
        seed,
        checks: vec![
            krylov_inverse_check(max_n)?,
            truncation_equivalence_check(max_n, &mut rng)?,
            monomial_exactness_check(max_n)?,
            neumann_check()?,
        ],
    })
}

/// Rounding floor of a residual whose entries are of size up to `e^t`.
fn residual_noise(t: f64) -> f64 {
    1e-12 * t.exp()
}

fn truncation_bound_check() -> Result<Check> {
    // measured / (bound + noise floor); must stay ≤ 1
    let mut check = Check::new("bessel-truncation-bound", 1.0);
    for family in [BasisFamily::BesselJ, BasisFamily::BesselI] {
        for n in 1..=40 {
            for t in [0.1, 0.5, 1.0, 2.0, 3.5, 5.0, 8.0] {
                let r = basis_residual(family, n, t)?;
                let measured = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                check.record(measured / (truncation_bound_bessel(n, t) + residual_noise(t)));
            }
        }
    }
    Ok(check)
}

fn growth_check(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut check = Check::new("wk-growth-bound", 1.0 + 1e-9);
    let count = 30;
    for _ in 0..GROWTH_CASES {
        let family = BasisFamily::ALL[rng.random_range(0..3)];
        let t = rng.random_range(0.2..8.0);
        let src = random_source(rng, 2)?;
        // dense sampling plus a margin for the maximum between samples
        let m_t = 1.01 * estimate_m_t(&src, t, 2048);
        let w = expansion_coeffs(family, &src.derivatives(count, 0.0)?, 0.0)?.w;
        let bounds = wk_growth_bounds(family, m_t, t, count)?;
        for (k, b) in bounds.iter().enumerate() {
            check.record(norm2(w.column(k).as_slice()) / b);
        }
    }
    Ok(check)
}

fn phi_check(rng: &mut ChaCha8Rng) -> Result<Check> {
    let mut check = Check::new("phi-norm-bound", 1.0 + 1e-10);
    for _ in 0..PHI_CASES {
        let n = rng.random_range(1..=8);
        let shift = rng.random_range(-3.0..1.0);
        let a = DenseMatrix::from_fn(n, n, |i, j| {
            let v = random_complex(rng, 1.0);
            if i == j { v + Complex64::new(shift, 0.0) } else { v }
        });
        for ell in 1..=5 {
            check.record(spectral_norm(&phi_matrix(ell, &a)?) / phi_norm_bound(ell, &a)?);
        }
    }
    Ok(check)
}

fn tail_check() -> Result<Check> {
    let mut check = Check::new("krylov-tail-bound", 1.0);
    for family in [BasisFamily::BesselJ, BasisFamily::BesselI] {
        for n in 1..=10 {
            let h = hessenberg(family, n)?;
            let k_mat = krylov_matrix(&h, n)?;
            let mut v = ComplexVector::zeros(n);
            v[0] = Complex64::new(1.0, 0.0);
            for k in 1..=n + 5 {
                v = &h * v;
                if k >= n {
                    let x = k_mat.solve_upper_triangular(&v).expect("Krylov matrix has a nonzero diagonal");
                    check.record(x.norm() / tail_bound(n));
                }
            }
        }
    }
    Ok(check)
}

/// Dominance sweeps: each bound against the quantity it controls. Worst
/// values are ratios measured/bound.
pub fn verify_bounds(seed: u64) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(VerifyReport {
        seed,
        checks: vec![
            truncation_bound_check()?,
            growth_check(&mut rng)?,
            phi_check(&mut rng)?,
            tail_check()?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemmas_pass() {
        let r = verify_lemmas(15, 7).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.checks[1].cases, 3 * EQUIVALENCE_CASES);
    }

    #[test]
    fn bounds_pass() {
        let r = verify_bounds(11).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn seeded_runs_repeat() {
        let a = verify_lemmas(6, 3).unwrap();
        let b = verify_lemmas(6, 3).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn failing_check_is_reported() {
        let mut c = Check::new("x", 1.0);
        c.record(0.5);
        assert!(c.passed());
        c.record(f64::NAN);
        assert!(!c.passed());
        let r = VerifyReport { seed: 0, checks: vec![c] };
        assert!(r.to_text().starts_with("FAIL x: 2 cases"));
        assert!(!Check::new("empty", 1.0).passed());
    }
}

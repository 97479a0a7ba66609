// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance checks. Each test prints one PASS/FAIL line and
//! then asserts. Reference values come from oracles written here: exact
//! Fourier-mode solutions of the periodic Schrödinger problems, power
//! series for Bessel functions, Gauss–Legendre quadrature and Taylor
//! propagation with tridiagonal generators.

use std::f64::consts::{PI, SQRT_2};
use std::io::Write;
use std::time::{Duration, Instant};

use expik::basis::{basis_residual, eval_basis, expansion_coeffs, hessenberg, krylov_matrix};
use expik::bench::{reference_solution, schrodinger_1d, schrodinger_2d, BenchmarkProblem};
use expik::bounds::{
    bessel_eigenvectors, convergence_indicator, phi_norm_bound, tail_bound, truncation_bound_bessel,
    wk_growth_bounds,
};
use expik::gsource::{Expr, ProfileTerm};
use expik::integrator::{infinite_arnoldi, truncated_arnoldi};
use expik::linalg::dense_expm;
use expik::{BasisFamily, Complex64, ComplexVector, DenseMatrix, GSource, SparseOperator};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex64;

/// Error level treated as converged when comparing curves.
const CONVERGENCE_FLOOR: f64 = 1e-11;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Writes past the test harness capture so the line always shows.
fn report(id: u32, title: &str, passed: bool, detail: &str, elapsed: Duration) {
    let line = format!(
        "[acceptance {id:>2}] {} {title}: {detail} ({:.2}s)\n",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

// ---------------------------------------------------------------- generators

/// Generator of the given family as `(sub, diag, super)` bands of length `n`.
fn bands(family: BasisFamily, n: usize) -> (Vec<f64>, Vec<f64>) {
    // sub[i] = H[i, i-1] (i ≥ 1), sup[i] = H[i, i+1]
    let sub: Vec<f64> = (0..=n)
        .map(|i| match (family, i) {
            (_, 0) => 0.0,
            (BasisFamily::Monomial, _) => 1.0,
            _ => 0.5,
        })
        .collect();
    let sup: Vec<f64> = (0..=n)
        .map(|i| match (family, i) {
            (BasisFamily::Monomial, _) => 0.0,
            (BasisFamily::BesselJ, 0) => -1.0,
            (BasisFamily::BesselJ, _) => -0.5,
            (BasisFamily::BesselI, 0) => 1.0,
            (BasisFamily::BesselI, _) => 0.5,
        })
        .collect();
    (sub, sup)
}

fn generator(family: BasisFamily, n: usize) -> DMatrix<f64> {
    let (sub, sup) = bands(family, n);
    DMatrix::from_fn(n, n, |i, j| {
        if j + 1 == i {
            sub[i]
        } else if i + 1 == j {
            sup[i]
        } else {
            0.0
        }
    })
}

fn tri_apply(sub: &[f64], sup: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let mut v = 0.0;
            if i > 0 {
                v += sub[i] * x[i - 1];
            }
            if i + 1 < n {
                v += sup[i] * x[i + 1];
            }
            v
        })
        .collect()
}

/// `exp(τ H) x` for the truncated generator, by Taylor series on substeps of length ≤ 1/2.
fn propagate(family: BasisFamily, tau: f64, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let (sub, sup) = bands(family, n);
    let pieces = (2.0 * tau).ceil().max(1.0) as usize;
    let h = tau / pieces as f64;
    let mut v = x.to_vec();
    for _ in 0..pieces {
        let mut term = v.clone();
        let mut acc = v.clone();
        for k in 1..40 {
            term = tri_apply(&sub, &sup, &term).into_iter().map(|t| t * h / k as f64).collect();
            acc.iter_mut().zip(&term).for_each(|(a, t)| *a += t);
            if term.iter().all(|t| t.abs() < 1e-300) {
                break;
            }
        }
        v = acc;
    }
    v
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `J_n(s)` or `I_n(s)` by the power series, started in log space.
fn bessel_series(family: BasisFamily, n: usize, s: f64) -> f64 {
    if s == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let sign = if family == BasisFamily::BesselJ { -1.0 } else { 1.0 };
    let q = 0.25 * s * s;
    let mut term = (n as f64 * (0.5 * s).ln() - ln_factorial(n)).exp();
    let mut sum = term;
    for m in 1..200 {
        term *= sign * q / (m as f64 * (m + n) as f64);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    (0..m)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=m {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

// ------------------------------------------------------- Fourier-mode oracle

/// `(e^z − 1)/z`.
fn phi1(z: C) -> C {
    if z.norm() < 0.5 {
        let mut term = c(1.0, 0.0);
        let mut sum = term;
        for k in 2..30 {
            term *= z / k as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `u(T)` per mode for `u' = λu + (1−i) sin²(t) ŝ`, `u(0) = û0`.
fn mode_solution(lambda: C, u0: C, s: C, t: f64) -> C {
    // ∫_0^T e^{λ(T−σ)} e^{μσ} dσ
    let conv = |mu: C| t * (lambda * t).exp() * phi1((mu - lambda) * t);
    let forcing = conv(c(0.0, 0.0)) * 0.5 - conv(c(0.0, 2.0)) * 0.25 - conv(c(0.0, -2.0)) * 0.25;
    (lambda * t).exp() * u0 + c(1.0, -1.0) * s * forcing
}

fn dft(x: &[C], inverse: bool) -> Vec<C> {
    let n = x.len();
    let sgn = if inverse { 1.0 } else { -1.0 };
    (0..n)
        .map(|k| {
            let s: C = x
                .iter()
                .enumerate()
                .map(|(j, v)| v * C::from_polar(1.0, sgn * 2.0 * PI * ((j * k) % n) as f64 / n as f64))
                .sum();
            if inverse { s } else { s / n as f64 }
        })
        .collect()
}

fn laplacian_eigenvalue(n: usize, k: usize) -> f64 {
    let s = (PI * k as f64 / n as f64).sin();
    -4.0 * (n * n) as f64 * s * s
}

fn exact_1d(n: usize, eps: f64, t: f64) -> Vec<C> {
    let x = |j: usize| j as f64 / n as f64;
    let s: Vec<C> = (0..n).map(|j| c((16.0 * PI * x(j) * (1.0 - x(j))).sin(), 0.0)).collect();
    let u0: Vec<C> = (0..n).map(|j| c((-100.0 * (x(j) - 0.5).powi(2)).exp(), 0.0)).collect();
    let (sh, uh) = (dft(&s, false), dft(&u0, false));
    let out: Vec<C> = (0..n)
        .map(|k| mode_solution(c(0.0, eps * laplacian_eigenvalue(n, k)), uh[k], sh[k], t))
        .collect();
    dft(&out, true)
}

/// 2-D transform of a field stored with index `j + m k`.
fn dft_2d(f: &[C], m: usize, inverse: bool) -> Vec<C> {
    let mut g = f.to_vec();
    for k in 0..m {
        let row = dft(&g[k * m..(k + 1) * m], inverse);
        g[k * m..(k + 1) * m].copy_from_slice(&row);
    }
    for j in 0..m {
        let col: Vec<C> = (0..m).map(|k| g[j + m * k]).collect();
        for (k, v) in dft(&col, inverse).into_iter().enumerate() {
            g[j + m * k] = v;
        }
    }
    g
}

fn exact_2d(m: usize, eps: f64, t: f64) -> Vec<C> {
    let coord = |j: usize| j as f64 / m as f64;
    let n = m * m;
    let s: Vec<C> = (0..n)
        .map(|i| {
            let (x, y) = (coord(i % m), coord(i / m));
            c((16.0 * PI * x * (1.0 - x) * y * (1.0 - y)).sin(), 0.0)
        })
        .collect();
    let u0: Vec<C> = (0..n)
        .map(|i| {
            let (x, y) = (coord(i % m), coord(i / m));
            c((-100.0 * ((x - 0.5).powi(2) + (y - 0.5).powi(2))).exp(), 0.0)
        })
        .collect();
    let (sh, uh) = (dft_2d(&s, m, false), dft_2d(&u0, m, false));
    let out: Vec<C> = (0..n)
        .map(|i| {
            let lam = eps * (laplacian_eigenvalue(m, i % m) + laplacian_eigenvalue(m, i / m));
            mode_solution(c(0.0, lam), uh[i], sh[i], t)
        })
        .collect();
    dft_2d(&out, m, true)
}

fn rel_err(u: &[C], r: &[C]) -> f64 {
    let d: f64 = u.iter().zip(r).map(|(a, b)| (a - b).norm_sqr()).sum();
    let s: f64 = r.iter().map(|b| b.norm_sqr()).sum();
    (d / s).sqrt()
}

fn study(p: &BenchmarkProblem, exact: &[C], family: BasisFamily, ns: &[usize]) -> Vec<f64> {
    ns.iter()
        .map(|&n| {
            let r = infinite_arnoldi(&p.a, &p.src, family, p.u0.as_slice(), p.horizon, n).unwrap();
            rel_err(r.u.as_slice(), exact)
        })
        .collect()
}

// ------------------------------------------------------------------ criteria

#[test]
fn criterion_01_chebyshev_krylov_inverse() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 1..=15 {
        // K = [e1, H e1, …, H^{N−1} e1] built here from the band definition
        let h = generator(BasisFamily::BesselI, n);
        let mut k = DMatrix::<f64>::zeros(n, n);
        let mut v = DVector::<f64>::zeros(n);
        v[0] = 1.0;
        for j in 0..n {
            k.set_column(j, &v);
            v = &h * v;
        }
        let inv = k.solve_upper_triangular(&DMatrix::identity(n, n)).unwrap();
        // Chebyshev monomial coefficients by the three-term recurrence
        let mut cheb = vec![vec![1.0], vec![0.0, 1.0]];
        for d in 2..n {
            let mut next = vec![0.0; d + 1];
            for (i, &a) in cheb[d - 1].iter().enumerate() {
                next[i + 1] += 2.0 * a;
            }
            for (i, &a) in cheb[d - 2].iter().enumerate() {
                next[i] -= a;
            }
            cheb.push(next);
        }
        let table = DMatrix::from_fn(n, n, |l, col| {
            if col == 0 {
                if l == 0 { 1.0 } else { 0.0 }
            } else {
                cheb[col].get(l).map_or(0.0, |a| 2.0 * a)
            }
        });
        worst = worst.max((&inv - &table).amax() / table.amax());
        // the library's inverse Krylov map must agree with the same table
        let lib = expik::basis::CoefficientMap::new(BasisFamily::BesselI, n).unwrap().inverse_krylov(n);
        let lib_dev = lib.iter().zip(table.iter()).map(|(a, b)| (a - c(*b, 0.0)).norm()).fold(0.0, f64::max);
        worst = worst.max(lib_dev / table.amax());
        let lib_k = krylov_matrix(&hessenberg(BasisFamily::BesselI, n).unwrap(), n).unwrap();
        let k_dev = lib_k.iter().zip(k.iter()).map(|(a, b)| (a - c(*b, 0.0)).norm()).fold(0.0, f64::max);
        worst = worst.max(k_dev / k.amax());
    }
    let h3 = generator(BasisFamily::BesselI, 3);
    let k3 = DMatrix::from_columns(&[
        DVector::from_vec(vec![1.0, 0.0, 0.0]),
        &h3 * DVector::from_vec(vec![1.0, 0.0, 0.0]),
        &h3 * &h3 * DVector::from_vec(vec![1.0, 0.0, 0.0]),
    ]);
    let hand = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, -2.0, 0.0, 2.0, 0.0, 0.0, 0.0, 4.0]);
    let hand_dev = (k3.solve_upper_triangular(&DMatrix::identity(3, 3)).unwrap() - &hand).amax();
    let elapsed = start.elapsed();
    let passed = worst <= 1e-8 && hand_dev <= 1e-14 && elapsed < Duration::from_secs(1);
    report(1, "Chebyshev/Krylov inverse identity, BesselI, N <= 15", passed,
        &format!("max relative deviation {worst:.2e}, N=3 hand deviation {hand_dev:.1e}"), elapsed);
    assert!(passed);
}

#[test]
fn criterion_02_truncation_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let families = [BasisFamily::Monomial, BasisFamily::BesselJ, BasisFamily::BesselI];
    for case in 0..20 {
        let n = rng.random_range(1..=30);
        let n_steps = rng.random_range(1..=12);
        let family = families[case % 3];
        let mut cr = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let trips: Vec<_> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (i, j, cr())).collect();
        let a = SparseOperator::from_triplets(n, &trips).unwrap();
        let v1 = ComplexVector::from_fn(n, |_, _| cr());
        let v2 = ComplexVector::from_fn(n, |_, _| cr());
        let u0: Vec<C> = (0..n).map(|_| cr()).collect();
        let rate = cr();
        let src = GSource::separable(
            n,
            vec![
                ProfileTerm::new(Expr::cos(Expr::T), v1),
                ProfileTerm::new(Expr::exp(Expr::mul(vec![Expr::constant(rate.re, rate.im), Expr::T])), v2),
            ],
        )
        .unwrap();
        let t = 0.8;
        let ia = infinite_arnoldi(&a, &src, family, &u0, t, n_steps).unwrap();
        for m in [n_steps, n_steps + 3, 2 * n_steps] {
            let coeffs = expansion_coeffs(family, &src.derivatives(m, 0.0).unwrap(), 0.0).unwrap();
            let tr = truncated_arnoldi(&a, &coeffs, &hessenberg(family, m).unwrap(), &u0, t, n_steps).unwrap();
            worst = worst.max((&ia.u - &tr.u).norm() / ia.u.norm());
            cases += 1;
        }
    }
    let elapsed = start.elapsed();
    let passed = worst <= 1e-10 && elapsed < Duration::from_secs(10);
    report(2, "truncation equivalence, 20 random problems", passed,
        &format!("{cases} comparisons, max relative deviation {worst:.2e}"), elapsed);
    assert!(passed);
}

#[test]
fn criterion_03_monomial_exactness() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 1..=20 {
        for t in [0.5f64, 1.0, 2.0] {
            let exact: Vec<f64> = (0..n).map(|i| (i as f64 * t.ln() - ln_factorial(i)).exp()).collect();
            let phi = eval_basis(BasisFamily::Monomial, n, t).unwrap();
            let e = dense_expm(&(hessenberg(BasisFamily::Monomial, n).unwrap() * c(t, 0.0))).unwrap();
            let d1 = phi.iter().zip(&exact).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let d2 = e.column(0).iter().zip(&exact).map(|(a, b)| (a - c(*b, 0.0)).norm_sqr()).sum::<f64>().sqrt();
            let d3 = phi.iter().zip(e.column(0).iter()).map(|(a, b)| (c(*a, 0.0) - b).norm_sqr()).sum::<f64>().sqrt();
            worst = worst.max(d1).max(d2).max(d3);
        }
    }
    let elapsed = start.elapsed();
    let passed = worst <= 1e-12 && elapsed < Duration::from_secs(1);
    report(3, "monomial basis is exact, N <= 20", passed, &format!("max deviation {worst:.2e}"), elapsed);
    assert!(passed);
}

#[test]
fn criterion_04_bessel_truncation_bound() {
    let start = Instant::now();
    let nodes = gauss_legendre(64);
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_quad: f64 = 0.0;
    let mut cases = 0;
    for family in [BasisFamily::BesselJ, BasisFamily::BesselI] {
        for n in 1..=40 {
            let (_, sup) = bands(family, n);
            let coupling = sup[n - 1];
            for t in [0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0] {
                // ε̄(t) = ∫_0^t exp((t−s)H) e_N · coupling · φ_N(s) ds
                let mut eps = vec![0.0; n];
                for &(x, w) in &nodes {
                    let s = 0.5 * t * (x + 1.0);
                    let weight = 0.5 * t * w * coupling * bessel_series(family, n, s);
                    let mut e_n = vec![0.0; n];
                    e_n[n - 1] = 1.0;
                    for (acc, v) in eps.iter_mut().zip(propagate(family, t - s, &e_n)) {
                        *acc += weight * v;
                    }
                }
                let measured = eps.iter().map(|v| v * v).sum::<f64>().sqrt();
                let bound = truncation_bound_bessel(n, t);
                let closed_form = (n as f64 * (0.5 * t).ln() - ln_factorial(n + 1)).exp() * SQRT_2 * t * t.exp();
                if measured > bound || (bound - closed_form).abs() > 1e-12 * closed_form {
                    violations += 1;
                }
                worst_ratio = worst_ratio.max(measured / bound);
                let lib = basis_residual(family, n, t).unwrap();
                let dev = lib.iter().zip(&eps).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                worst_quad = worst_quad.max(dev);
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let passed = violations == 0 && worst_quad <= 1e-8 && elapsed < Duration::from_secs(30);
    report(4, "Bessel truncation bound, N <= 40, t <= 8", passed,
        &format!("{cases} cases, {violations} violations, max measured/bound {worst_ratio:.2e}, max deviation from quadrature {worst_quad:.2e}"),
        elapsed);
    assert!(passed);
}

#[test]
fn criterion_05_eigenvector_conditioning() {
    let start = Instant::now();
    let mut worst_kappa: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    let mut worst_exp: f64 = 0.0;
    for family in [BasisFamily::BesselJ, BasisFamily::BesselI] {
        for n in [4usize, 8, 16, 32] {
            let (v, eig) = bessel_eigenvectors(family, n).unwrap();
            let h = generator(family, n).map(|x| c(x, 0.0));
            let lam = DMatrix::from_diagonal(&DVector::from_vec(eig.clone()));
            let residual = (&h * &v - &v * &lam).camax() / v.camax();
            // eigenvalues are distinct, so V is determined up to column scaling;
            // the Chebyshev normalization has unit first row
            let first_row_ok = v.row(0).iter().all(|x| (x - c(1.0, 0.0)).norm() < 1e-15);
            let sv = v.clone().svd(false, false).singular_values;
            let kappa = sv.max() / sv.min();
            worst_kappa = worst_kappa.max((kappa - SQRT_2).abs());
            worst_residual = worst_residual.max(if first_row_ok { residual } else { f64::INFINITY });
            if family == BasisFamily::BesselJ {
                for i in 0..=200 {
                    let t = 10.0 * i as f64 / 200.0;
                    let cols: Vec<DVector<f64>> = (0..n)
                        .map(|j| {
                            let mut e = vec![0.0; n];
                            e[j] = 1.0;
                            DVector::from_vec(propagate(family, t, &e))
                        })
                        .collect();
                    let e = DMatrix::from_columns(&cols);
                    worst_exp = worst_exp.max(e.svd(false, false).singular_values.max());
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let passed = worst_kappa <= 1e-8 && worst_residual <= 1e-12 && worst_exp <= SQRT_2 && elapsed < Duration::from_secs(5);
    report(5, "eigenvector conditioning kappa = sqrt 2", passed,
        &format!("max |kappa - sqrt2| {worst_kappa:.2e}, eigen-residual {worst_residual:.1e}, max ||exp(tH)|| (BesselJ) {worst_exp:.6}"),
        elapsed);
    assert!(passed);
}

#[test]
fn criterion_06_neumann_identity() {
    let start = Instant::now();
    let n = 30;
    let t: f64 = 1.0;
    let ones = DenseMatrix::from_element(1, n, c(1.0, 0.0));
    let w = expansion_coeffs(BasisFamily::BesselI, &ones, 0.0).unwrap().w;
    let coeff_dev = w
        .iter()
        .enumerate()
        .map(|(k, v)| (v - c(if k == 0 { 1.0 } else { 2.0 }, 0.0)).norm())
        .fold(0.0, f64::max);
    let series: f64 = (0..n).map(|l| w[(0, l)].re * bessel_series(BasisFamily::BesselI, l, t)).sum();
    let lib: f64 = eval_basis(BasisFamily::BesselI, n, t).unwrap().iter().zip(w.iter()).map(|(p, c)| p * c.re).sum();
    let err = (series - t.exp()).abs().max((lib - t.exp()).abs());
    let elapsed = start.elapsed();
    let passed = coeff_dev == 0.0 && err < 1e-10 && elapsed < Duration::from_secs(1);
    report(6, "Neumann expansion of exp, N = 30, t = 1", passed,
        &format!("coefficient deviation {coeff_dev:.1e}, |sum - e| {err:.2e}"), elapsed);
    assert!(passed);
}

#[test]
fn criterion_07_schrodinger_1d() {
    let start = Instant::now();
    let ns: Vec<usize> = (10..=80).step_by(10).collect();
    let families = [BasisFamily::Monomial, BasisFamily::BesselJ, BasisFamily::BesselI];

    // regime 1: family-insensitive convergence
    let p = schrodinger_1d(100, 1e-3).unwrap().with_horizon(0.5);
    let exact = exact_1d(100, 1e-3, 0.5);
    let oracle_gap = rel_err(reference_solution(&p, 0.5).unwrap().as_slice(), &exact);
    let fast: Vec<Vec<f64>> = families.iter().map(|&f| study(&p, &exact, f, &ns[..6])).collect();
    let at_60: Vec<f64> = fast.iter().map(|e| e[5]).collect();
    let spread_above = |floor: f64| -> f64 {
        (0..6)
            .map(|i| {
                let col: Vec<f64> = fast.iter().map(|e| e[i].max(floor)).collect();
                col.iter().copied().fold(0.0, f64::max) / col.iter().copied().fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    // below this level the curves are rounding noise and their ratio is meaningless
    let spread = spread_above(CONVERGENCE_FLOOR);
    let raw_spread = spread_above(0.0);
    let ok_1 = at_60.iter().all(|&e| e <= 1e-6) && spread <= 10.0;

    // regime 2: slow forcing dominates, families separate at small N
    let q = schrodinger_1d(100, 1e-5).unwrap().with_horizon(10.0);
    let exact = exact_1d(100, 1e-5, 10.0);
    let slow: Vec<Vec<f64>> = families.iter().map(|&f| study(&q, &exact, f, &ns)).collect();
    let decrease: Vec<f64> = slow.iter().map(|e| (e[0] / e[7]).log10()).collect();
    let separation = (0..3)
        .map(|i| (slow[1][i] / slow[0][i]).log10().abs())
        .fold(0.0, f64::max);
    let ok_2 = decrease.iter().all(|&d| d >= 6.0) && separation >= 0.3;

    let elapsed = start.elapsed();
    let passed = ok_1 && ok_2 && oracle_gap < 1e-8 && elapsed < Duration::from_secs(120);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>().join(" ");
    report(7, "1-D Schrodinger end to end", passed,
        &format!(
            "eps=1e-3: errors at N=60 [{}], max family spread {:.2}x above {CONVERGENCE_FLOOR:.0e} ({raw_spread:.1}x including roundoff); eps=1e-5: decades N=10->80 [{}], BesselJ/Monomial separation {:.2} decades; RK4 reference gap {oracle_gap:.1e}",
            fmt(&at_60),
            spread,
            decrease.iter().map(|d| format!("{d:.1}")).collect::<Vec<_>>().join(" "),
            separation
        ),
        elapsed);
    for (f, e) in families.iter().zip(&fast) {
        let _ = writeln!(std::io::stdout().lock(), "               eps=1e-3 {f}: {}", fmt(e));
    }
    for (f, e) in families.iter().zip(&slow) {
        let _ = writeln!(std::io::stdout().lock(), "               eps=1e-5 {f}: {}", fmt(e));
    }
    assert!(passed);
}

#[test]
fn criterion_08_indicator_trend() {
    let start = Instant::now();
    let n = 100;
    let eps = 1e-3;
    let p = schrodinger_1d(n, eps).unwrap().with_horizon(0.5);
    // spectral radius of iεD: largest |eigenvalue| of the periodic stencil
    let rho = (0..n).map(|k| (eps * laplacian_eigenvalue(n, k)).abs()).fold(0.0, f64::max);
    let indicator = |big_n: usize| {
        let r = infinite_arnoldi(&p.a, &p.src, BasisFamily::BesselJ, p.u0.as_slice(), 0.5, big_n).unwrap();
        let f = &r.f;
        let norm2 = |m: &DenseMatrix| m.clone().svd(false, false).singular_values.max();
        let mut ln = norm2(f).ln();
        let mut power = f / c(norm2(f), 0.0);
        for _ in 1..r.n_used {
            power = &power * f;
            let s = norm2(&power);
            ln += s.ln();
            power /= c(s, 0.0);
        }
        let measured = ((ln / r.n_used as f64).exp() / rho - 1.0).abs();
        (measured, convergence_indicator(f, rho).unwrap())
    };
    let (i10, lib10) = indicator(10);
    let (i80, lib80) = indicator(80);
    let elapsed = start.elapsed();
    let agree = (i10 - lib10).abs() <= 1e-8 * i10.max(1.0) && (i80 - lib80).abs() <= 1e-8 * i80.max(1.0);
    let passed = i80 < i10 && agree && elapsed < Duration::from_secs(30);
    report(8, "convergence indicator decreases with N", passed,
        &format!("indicator N=10 {i10:.3e}, N=80 {i80:.3e} (library {lib10:.3e}, {lib80:.3e}), rho {rho}"), elapsed);
    assert!(passed);
}

#[test]
fn criterion_09_bound_dominance() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut violations = [0usize; 3];
    let mut cases = [0usize; 3];

    // w_k growth: g(λ) = Σ_j e^{a_j λ} v_j with exact derivatives
    let count = 30;
    for _ in 0..60 {
        let family = [BasisFamily::Monomial, BasisFamily::BesselJ, BasisFamily::BesselI][rng.random_range(0..3)];
        let t = rng.random_range(0.2..8.0);
        let terms: Vec<(C, [C; 2])> = (0..2)
            .map(|_| {
                let a = c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
                (a, [c(rng.random_range(-1.0..1.0), 0.0), c(0.0, rng.random_range(-1.0..1.0))])
            })
            .collect();
        let g = DenseMatrix::from_fn(2, count, |i, l| terms.iter().map(|(a, v)| a.powu(l as u32) * v[i]).sum());
        // sampled maximum on |λ| = t plus a Lipschitz margin between samples
        let samples = 4096;
        let norm_at = |z: C| -> f64 {
            (0..2).map(|i| terms.iter().map(|(a, v)| (a * z).exp() * v[i]).sum::<C>().norm_sqr()).sum::<f64>().sqrt()
        };
        let sampled = (0..samples).map(|k| norm_at(C::from_polar(t, 2.0 * PI * k as f64 / samples as f64))).fold(0.0, f64::max);
        let lipschitz: f64 = terms
            .iter()
            .map(|(a, v)| a.norm() * (a.norm() * t).exp() * (v[0].norm_sqr() + v[1].norm_sqr()).sqrt())
            .sum();
        let m_t = sampled + PI * t / samples as f64 * lipschitz;
        let w = expansion_coeffs(family, &g, 0.0).unwrap().w;
        let b = wk_growth_bounds(family, m_t, t, count).unwrap();
        for (k, bound) in b.iter().enumerate() {
            cases[0] += 1;
            if w.column(k).norm() > *bound {
                violations[0] += 1;
            }
        }
    }

    // φ_ℓ norm: series evaluation against max(1, e^μ)/ℓ!
    for _ in 0..60 {
        let n = rng.random_range(1..=8);
        let shift = rng.random_range(-3.0..1.0);
        let a = DMatrix::from_fn(n, n, |i, j| {
            let v = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if i == j { v + shift } else { v }
        });
        for ell in 1..=5usize {
            let mut term = DMatrix::<C>::identity(n, n) / c((ln_factorial(ell)).exp(), 0.0);
            let mut phi = term.clone();
            for k in 1..200 {
                term = &term * &a / c((k + ell) as f64, 0.0);
                phi += &term;
                if term.camax() < 1e-20 {
                    break;
                }
            }
            let measured = phi.svd(false, false).singular_values.max();
            let herm = (&a + a.adjoint()) / c(2.0, 0.0);
            let mu = herm.symmetric_eigenvalues().max();
            let formula = mu.max(0.0).exp() / ln_factorial(ell).exp();
            let bound = phi_norm_bound(ell, &a).unwrap();
            cases[1] += 1;
            if measured > bound || (bound - formula).abs() > 1e-8 * formula {
                violations[1] += 1;
            }
        }
    }

    // Krylov tail: ‖K_N^{-1} H_N^k e_1‖ for k ≥ N
    for family in [BasisFamily::BesselJ, BasisFamily::BesselI] {
        for n in 1..=15 {
            let h = generator(family, n);
            let mut kmat = DMatrix::<f64>::zeros(n, n);
            let mut v = DVector::<f64>::zeros(n);
            v[0] = 1.0;
            for j in 0..n {
                kmat.set_column(j, &v);
                v = &h * v;
            }
            for _ in 0..=10 {
                let x = kmat.solve_upper_triangular(&v).unwrap();
                cases[2] += 1;
                if x.norm() > tail_bound(n) {
                    violations[2] += 1;
                }
                v = &h * v;
            }
        }
    }
    let elapsed = start.elapsed();
    let passed = violations == [0, 0, 0] && elapsed < Duration::from_secs(30);
    report(9, "bound dominance sweeps", passed,
        &format!(
            "w_k growth {}/{} violations, phi norm {}/{}, Krylov tail {}/{}",
            violations[0], cases[0], violations[1], cases[1], violations[2], cases[2]
        ),
        elapsed);
    assert!(passed);
}

#[test]
fn criterion_10_schrodinger_2d() {
    let start = Instant::now();
    let (m, eps, t) = (32, 5e-3, 1.0);
    let p = schrodinger_2d(m, eps).unwrap().with_horizon(t);
    let exact = exact_2d(m, eps, t);
    let errors: Vec<(BasisFamily, f64)> = [BasisFamily::Monomial, BasisFamily::BesselJ, BasisFamily::BesselI]
        .into_iter()
        .map(|f| (f, study(&p, &exact, f, &[80])[0]))
        .collect();
    let elapsed = start.elapsed();
    let passed = errors.iter().all(|(_, e)| *e <= 1e-6) && elapsed < Duration::from_secs(180);
    report(10, "2-D Schrodinger 32x32, N = 80", passed,
        &format!("errors {}", errors.iter().map(|(f, e)| format!("{f} {e:.2e}")).collect::<Vec<_>>().join(", ")),
        elapsed);
    assert!(passed);
}

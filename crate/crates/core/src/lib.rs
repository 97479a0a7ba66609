// SPDX-License-Identifier: Apache-2.0

//! Infinite Arnoldi exponential integrator for linear inhomogeneous ODEs
//!
//! ```text
//! u'(t) = A u(t) + g(t),  u(0) = u0
//! ```
//!
//! The inhomogeneity is expanded in a basis `φ_0, φ_1, …` whose derivative
//! is generated by an infinite Hessenberg matrix (scaled monomials, Bessel
//! functions `J_ℓ` or modified Bessel functions `I_ℓ`). The ODE is then an
//! infinite-dimensional homogeneous problem and Arnoldi's method is run on
//! it with a basis that grows by one row and one column per step.
//!
//! Module map:
//!
//! * [`linalg`] – CSR operator, dense exponential, φ-functions, estimates, Matrix Market IO
//! * [`basis`] – Hessenberg generators, basis evaluation, Chebyshev tables, coefficient maps
//! * [`gsource`] – representations of `g` and its derivative columns
//! * [`integrator`] – the structured Arnoldi integrator and its explicit-truncation oracle
//! * [`bounds`] – computable error bounds and the convergence indicator
//! * [`bench`] – Schrödinger benchmark problems, certified reference solver, studies
//! * [`verify`] – seeded identity and bound checks with pass/fail reports
//! * [`config`] – run configuration parsing shared by the CLI

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod basis;
pub mod bench;
pub mod bounds;
pub mod config;
pub mod error;
pub mod gsource;
pub mod integrator;
pub mod linalg;
pub mod verify;

pub use basis::BasisFamily;
pub use error::{Error, Result};
pub use gsource::GSource;
pub use integrator::{infinite_arnoldi, integrate_steps, IntegratorResult};
pub use linalg::{ComplexVector, DenseMatrix, SparseOperator};

pub use num_complex::Complex64;

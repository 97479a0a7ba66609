// SPDX-License-Identifier: Apache-2.0

//! Schrödinger benchmark problems, a certified reference solver and
//! convergence/timing studies.

pub mod oracle;
pub mod problems;
pub mod study;

pub use oracle::{reference_report, reference_solution, Reference};
pub use problems::{schrodinger_1d, schrodinger_2d, BenchmarkProblem};
pub use study::{
    dump_problem, run_convergence_study, run_convergence_study_against, run_timing_study,
    run_timing_study_against, thread_limit, StudyResult, StudyRow, STUDY_CSV_HEADER,
};

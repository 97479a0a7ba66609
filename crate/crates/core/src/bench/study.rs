// SPDX-License-Identifier: Apache-2.0

//! Convergence and timing studies over the Krylov dimension `N`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Mutex;
use std::time::Instant;

use serde_json::json;

use super::oracle::reference_solution;
use super::BenchmarkProblem;
use crate::basis::BasisFamily;
use crate::error::{Error, Result};
use crate::integrator::infinite_arnoldi;
use crate::linalg::{mtx, norm2, ComplexVector};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "EXPIK_THREADS";
/// Column names of the study CSV.
pub const STUDY_CSV_HEADER: &str = "family,epsilon,T,N,error,seconds";
const TIMING_REPEATS: usize = 3;

/// One `(family, N)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub family: BasisFamily,
    pub epsilon: f64,
    pub t: f64,
    pub n: usize,
    /// `‖u_N − u_ref‖ / ‖u_ref‖`.
    pub error: f64,
    /// Median wallclock of the integration; only set by timing studies.
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
}

impl StudyResult {
    /// Rows of one family in increasing `N`.
    pub fn series(&self, family: BasisFamily) -> Vec<&StudyRow> {
        self.rows.iter().filter(|r| r.family == family).collect()
    }

    /// Error of `family` at dimension `n`, if present.
    pub fn error_at(&self, family: BasisFamily, n: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.family == family && r.n == n).map(|r| r.error)
    }

    /// Errors are nonnegative and `N` strictly increases within each family.
    pub fn is_well_formed(&self) -> bool {
        BasisFamily::ALL.iter().all(|&f| {
            let s = self.series(f);
            s.iter().all(|r| r.error >= 0.0) && s.windows(2).all(|w| w[0].n < w[1].n)
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(STUDY_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let seconds = r.seconds.map(|s| format!("{s:e}")).unwrap_or_default();
            let _ = writeln!(out, "{},{:e},{},{},{:e},{}", r.family, r.epsilon, r.t, r.n, r.error, seconds);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Worker threads allowed by `EXPIK_THREADS`; 1 when unset or invalid.
pub fn thread_limit() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(1)
}

fn check_dims(ns: &[usize]) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::contract("study needs at least one Krylov dimension"));
    }
    if ns[0] == 0 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::contract(format!("Krylov dimensions {ns:?} must be positive and strictly increasing")));
    }
    Ok(())
}

fn relative_error(u: &ComplexVector, reference: &ComplexVector) -> f64 {
    let diff = u - reference;
    let scale = reference.norm();
    if scale == 0.0 {
        diff.norm()
    } else {
        norm2(diff.as_slice()) / scale
    }
}

/// Runs `cells` with at most `threads` workers; results keep the input order.
fn run_cells<T: Send>(
    cells: &[(BasisFamily, usize)],
    threads: usize,
    job: impl Fn(BasisFamily, usize) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let threads = threads.clamp(1, cells.len().max(1));
    if threads == 1 {
        return cells.iter().map(|&(f, n)| job(f, n)).collect();
    }
    let next = Mutex::new(0usize);
    let slots: Vec<Mutex<Option<Result<T>>>> = cells.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = {
                    let mut guard = next.lock().expect("work counter poisoned");
                    let i = *guard;
                    *guard += 1;
                    i
                };
                let Some(&(f, n)) = cells.get(i) else { break };
                *slots[i].lock().expect("result slot poisoned") = Some(job(f, n));
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().expect("result slot poisoned").expect("cell not run"))
        .collect()
}

/// Relative errors at `T = p.horizon` for every family and `N`, against the
/// certified reference.
pub fn run_convergence_study(p: &BenchmarkProblem, families: &[BasisFamily], ns: &[usize]) -> Result<StudyResult> {
    let reference = reference_solution(p, p.horizon)?;
    run_convergence_study_against(p, families, ns, &reference, thread_limit())
}

/// [`run_convergence_study`] with a precomputed reference and explicit thread count.
pub fn run_convergence_study_against(
    p: &BenchmarkProblem,
    families: &[BasisFamily],
    ns: &[usize],
    reference: &ComplexVector,
    threads: usize,
) -> Result<StudyResult> {
    check_dims(ns)?;
    if reference.len() != p.dim() {
        return Err(Error::contract("reference length differs from problem dimension"));
    }
    let cells: Vec<_> = families.iter().flat_map(|&f| ns.iter().map(move |&n| (f, n))).collect();
    let errors = run_cells(&cells, threads, |family, n| {
        let r = infinite_arnoldi(&p.a, &p.src, family, p.u0.as_slice(), p.horizon, n)?;
        Ok(relative_error(&r.u, reference))
    })?;
    let rows = cells
        .iter()
        .zip(errors)
        .map(|(&(family, n), error)| StudyRow {
            family,
            epsilon: p.epsilon,
            t: p.horizon,
            n,
            error,
            seconds: None,
        })
        .collect();
    Ok(StudyResult { rows })
}

/// Wallclock of the integration for each `N` (median of three runs) and
/// the corresponding error. Runs serially.
pub fn run_timing_study(p: &BenchmarkProblem, family: BasisFamily, ns: &[usize]) -> Result<StudyResult> {
    let reference = reference_solution(p, p.horizon)?;
    run_timing_study_against(p, family, ns, &reference)
}

/// [`run_timing_study`] with a precomputed reference.
pub fn run_timing_study_against(
    p: &BenchmarkProblem,
    family: BasisFamily,
    ns: &[usize],
    reference: &ComplexVector,
) -> Result<StudyResult> {
    check_dims(ns)?;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let mut times = Vec::with_capacity(TIMING_REPEATS);
        let mut error = 0.0;
        for _ in 0..TIMING_REPEATS {
            let start = Instant::now();
            let r = infinite_arnoldi(&p.a, &p.src, family, p.u0.as_slice(), p.horizon, n)?;
            times.push(start.elapsed().as_secs_f64());
            error = relative_error(&r.u, reference);
        }
        times.sort_by(f64::total_cmp);
        rows.push(StudyRow {
            family,
            epsilon: p.epsilon,
            t: p.horizon,
            n,
            error,
            seconds: Some(times[TIMING_REPEATS / 2]),
        });
    }
    Ok(StudyResult { rows })
}

/// Writes `A.mtx`, `u0.mtx`, one `source_<k>.mtx` per forcing direction and
/// a `problem.json` that references them and is accepted as an external
/// problem by the run configuration.
pub fn dump_problem(p: &BenchmarkProblem, dir: &Path) -> Result<()> {
    let io_err = |path: &Path| {
        let path = path.display().to_string();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    mtx::write_sparse(&dir.join("A.mtx"), &p.a)?;
    mtx::write_vector(&dir.join("u0.mtx"), p.u0.as_slice())?;
    let mut terms = Vec::new();
    for (k, term) in p.src.terms().iter().enumerate() {
        let name = format!("source_{k}.mtx");
        mtx::write_vector(&dir.join(&name), term.direction.as_slice())?;
        terms.push(json!({ "profile": term.profile.to_json(), "direction": name }));
    }
    let bundle = json!({
        "label": p.label,
        "epsilon": p.epsilon,
        "T": p.horizon,
        "matrix": "A.mtx",
        "u0": "u0.mtx",
        "source": terms,
    });
    let path = dir.join("problem.json");
    let text = serde_json::to_string_pretty(&bundle)?;
    fs::write(&path, text + "\n").map_err(io_err(&path))
}

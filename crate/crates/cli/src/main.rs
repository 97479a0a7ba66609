// SPDX-License-Identifier: Apache-2.0

//! `expik` command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 on numeric
//! failure or a failed verification.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde_json::{json, Value};

use expik::bench::{dump_problem, run_convergence_study, run_timing_study, BenchmarkProblem};
use expik::bounds::{convergence_indicator, estimate_m_t, growth_constant, BoundInputs, BoundReport};
use expik::config::{BuiltinProblem, Dimensions, ExternalProblem, Families, RunConfig};
use expik::linalg::{log_norm, spectral_radius_estimate};
use expik::verify::{verify_bounds, verify_lemmas, VerifyReport};
use expik::{integrate_steps, BasisFamily, Error};

const DEFAULT_FAMILY: BasisFamily = BasisFamily::BesselJ;
const M_T_SAMPLES: usize = 256;

#[derive(Parser, Debug)]
#[command(name = "expik", version, about = "Infinite Arnoldi integrator for u' = Au + g(t)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one problem and write the result as JSON.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Split [0, T] into this many equal steps.
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Relative error against the reference solution for each family and N.
    StudyConvergence {
        #[command(flatten)]
        run: RunArgs,
        /// Also write the problem as Matrix Market files and a JSON bundle.
        #[arg(long, value_name = "DIR")]
        dump_problem: Option<PathBuf>,
    },
    /// Wallclock (median of three runs) and error for each N.
    StudyTiming {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Bound dominance sweeps, plus the bound report of one run if a problem is given.
    VerifyBounds {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Chebyshev/Krylov-inverse identity, truncation equivalence and related identities.
    VerifyLemmas {
        /// Largest Krylov dimension checked.
        #[arg(long = "max-N", default_value_t = 15)]
        max_n: usize,
        /// Seed of the randomized sweeps (default 0)
        #[arg(long)]
        seed: Option<u64>,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in problem: schrodinger1d or schrodinger2d.
    #[arg(long)]
    builtin: Option<String>,
    /// Grid points (1-D) or points per side (2-D) of the built-in problem.
    #[arg(long = "n")]
    grid: Option<usize>,
    /// Diffusion parameter of the built-in problem.
    #[arg(long)]
    eps: Option<f64>,
    /// Problem bundle (problem.json) referencing Matrix Market files.
    #[arg(long, conflicts_with = "builtin")]
    external: Option<PathBuf>,
    /// Basis family, or a comma-separated list for convergence studies.
    #[arg(long, value_delimiter = ',')]
    family: Vec<BasisFamily>,
    /// Krylov dimension, or a comma-separated increasing list for studies.
    #[arg(long = "N", value_delimiter = ',')]
    dims: Vec<usize>,
    /// Final time.
    #[arg(long = "T")]
    horizon: Option<f64>,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed of the randomized sweeps (default 0)
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

impl RunArgs {
    fn flags(&self) -> Outcome<RunConfig> {
        if (self.grid.is_some() || self.eps.is_some()) && self.builtin.is_none() {
            return Err(Failure::Usage("--n and --eps require --builtin".into()));
        }
        Ok(RunConfig {
            builtin: self.builtin.as_ref().map(|name| BuiltinProblem {
                name: name.clone(),
                n: self.grid,
                eps: self.eps,
            }),
            external: self.external.clone().map(ExternalProblem::Bundle),
            family: match self.family.as_slice() {
                [] => None,
                [f] => Some(Families::One(*f)),
                list => Some(Families::List(list.to_vec())),
            },
            dims: match self.dims.as_slice() {
                [] => None,
                [n] => Some(Dimensions::One(*n)),
                list => Some(Dimensions::List(list.to_vec())),
            },
            horizon: self.horizon,
            out: self.out.clone(),
            seed: self.seed,
            base_dir: None,
        })
    }

    /// The configuration file overlaid with the flags.
    fn resolve(&self) -> Outcome<RunConfig> {
        let flags = self.flags()?;
        let cfg = match &self.config {
            Some(path) => {
                let mut file = RunConfig::from_file(path)?;
                // paths given on the command line are relative to the working directory
                if flags.external.is_some() {
                    file.base_dir = None;
                }
                file.overlay(flags)
            }
            None => flags,
        };
        if cfg.builtin.is_none() && cfg.external.is_none() {
            return Err(Failure::Usage("a problem is required: --builtin, --external or --config".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn require_horizon(cfg: &RunConfig) -> Outcome<f64> {
    cfg.horizon.ok_or_else(|| Failure::Usage("--T is required".into()))
}

fn require_dims(cfg: &RunConfig) -> Outcome<Vec<usize>> {
    cfg.dims
        .as_ref()
        .map(Dimensions::as_list)
        .ok_or_else(|| Failure::Usage("--N is required".into()))
}

fn single<T: Copy>(list: Vec<T>, what: &str) -> Outcome<T> {
    match list.as_slice() {
        [x] => Ok(*x),
        _ => Err(Failure::Usage(format!("{what} takes a single value for this command"))),
    }
}

fn families(cfg: &RunConfig, default: &[BasisFamily]) -> Vec<BasisFamily> {
    cfg.family.as_ref().map(Families::as_list).unwrap_or_else(|| default.to_vec())
}

fn write_output(out: Option<&Path>, text: &str) -> Outcome<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| {
            Failure::Run(Error::Io {
                path: path.display().to_string(),
                source,
            })
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| Failure::Run(Error::Io { path: "<stdout>".into(), source }))
        }
    }
}

fn json_text(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

/// Comment lines recording the effective configuration ahead of a CSV body.
fn csv_with_provenance(cfg: &RunConfig, p: &BenchmarkProblem, body: &str) -> String {
    format!(
        "# expik {}\n# problem: {}\n# config: {}\n{body}",
        env!("CARGO_PKG_VERSION"),
        p.label,
        cfg.to_json()
    )
}

fn provenance(cfg: &RunConfig, p: &BenchmarkProblem) -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "problem": p.label,
        "dimension": p.dim(),
        "config": cfg.to_json(),
    })
}

fn solve(run: &RunArgs, steps: usize) -> Outcome<()> {
    let cfg = run.resolve()?;
    let t = require_horizon(&cfg)?;
    let n = single(require_dims(&cfg)?, "--N")?;
    let family = single(families(&cfg, &[DEFAULT_FAMILY]), "--family")?;
    if steps == 0 {
        return Err(Failure::Usage("--steps must be at least 1".into()));
    }
    let p = cfg.problem()?;
    let result = if t == 0.0 {
        expik::infinite_arnoldi(&p.a, &p.src, family, p.u0.as_slice(), 0.0, n)?
    } else {
        let h = vec![t / steps as f64; steps];
        integrate_steps(&p.a, &p.src, family, p.u0.as_slice(), &h, n)?
    };
    let mut out = result.to_json();
    out["family"] = json!(family);
    out["T"] = json!(t);
    out["steps"] = json!(steps);
    out["provenance"] = provenance(&cfg, &p);
    write_output(cfg.out.as_deref(), &json_text(&out))
}

fn study_convergence(run: &RunArgs, dump: Option<&Path>) -> Outcome<()> {
    let cfg = run.resolve()?;
    require_horizon(&cfg)?;
    let dims = require_dims(&cfg)?;
    let fams = families(&cfg, &BasisFamily::ALL);
    let p = cfg.problem()?;
    if let Some(dir) = dump {
        dump_problem(&p, dir)?;
    }
    let study = run_convergence_study(&p, &fams, &dims)?;
    write_output(cfg.out.as_deref(), &csv_with_provenance(&cfg, &p, &study.to_csv()))
}

fn study_timing(run: &RunArgs) -> Outcome<()> {
    let cfg = run.resolve()?;
    require_horizon(&cfg)?;
    let dims = require_dims(&cfg)?;
    let family = single(families(&cfg, &[DEFAULT_FAMILY]), "--family")?;
    let p = cfg.problem()?;
    let study = run_timing_study(&p, family, &dims)?;
    write_output(cfg.out.as_deref(), &csv_with_provenance(&cfg, &p, &study.to_csv()))
}

fn bound_report(cfg: &RunConfig) -> Outcome<(BenchmarkProblem, Vec<BoundReport>)> {
    let t = require_horizon(cfg)?;
    let dims = require_dims(cfg)?;
    let fams = families(cfg, &[DEFAULT_FAMILY]);
    let p = cfg.problem()?;
    let mu = log_norm(&p.a)?;
    let rho = spectral_radius_estimate(&p.a)?;
    let m_t = estimate_m_t(&p.src, t, M_T_SAMPLES);
    let n_max = *dims.last().expect("non-empty");
    let growth = growth_constant(&p.src.derivatives(n_max, 0.0)?, p.a.norm1());
    let mut reports = Vec::new();
    for family in fams {
        for &n in &dims {
            let r = expik::infinite_arnoldi(&p.a, &p.src, family, p.u0.as_slice(), t, n)?;
            let indicator = if rho > 0.0 { Some(convergence_indicator(&r.f, rho)?) } else { None };
            reports.push(BoundReport::compute(&BoundInputs {
                family,
                n,
                t,
                m_t,
                mu,
                growth: Some(growth),
                indicator,
            })?);
        }
    }
    Ok((p, reports))
}

fn verification_exit(report: &VerifyReport) -> Outcome<ExitCode> {
    eprint!("{}", report.to_text());
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn verify_bounds_cmd(run: &RunArgs) -> Outcome<ExitCode> {
    let has_problem = run.config.is_some() || run.builtin.is_some() || run.external.is_some();
    let (cfg, runs) = if has_problem {
        let cfg = run.resolve()?;
        let (p, reports) = bound_report(&cfg)?;
        let reports: Vec<Value> = reports.iter().map(BoundReport::to_json).collect();
        (cfg.clone(), Some(json!({ "provenance": provenance(&cfg, &p), "reports": reports })))
    } else {
        (run.flags()?, None)
    };
    let sweeps = verify_bounds(cfg.seed.unwrap_or(0))?;
    let out = json!({ "sweeps": sweeps.to_json(), "run": runs });
    write_output(cfg.out.as_deref(), &json_text(&out))?;
    verification_exit(&sweeps)
}

fn verify_lemmas_cmd(max_n: usize, seed: Option<u64>, out: Option<&Path>) -> Outcome<ExitCode> {
    if max_n == 0 {
        return Err(Failure::Usage("--max-N must be at least 1".into()));
    }
    let report = verify_lemmas(max_n, seed.unwrap_or(0))?;
    write_output(out, &json_text(&report.to_json()))?;
    verification_exit(&report)
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Solve { .. } => "solve",
        Command::StudyConvergence { .. } => "study-convergence",
        Command::StudyTiming { .. } => "study-timing",
        Command::VerifyBounds { .. } => "verify-bounds",
        Command::VerifyLemmas { .. } => "verify-lemmas",
    }
}

fn usage_text(name: &str) -> String {
    let mut cmd = Cli::command();
    cmd.build();
    match cmd.find_subcommand_mut(name) {
        Some(sub) => sub.render_usage().to_string(),
        None => cmd.render_usage().to_string(),
    }
}

fn dispatch(cli: Cli) -> Outcome<ExitCode> {
    match cli.command {
        Command::Solve { run, steps } => solve(&run, steps).map(|_| ExitCode::SUCCESS),
        Command::StudyConvergence { run, dump_problem } => {
            study_convergence(&run, dump_problem.as_deref()).map(|_| ExitCode::SUCCESS)
        }
        Command::StudyTiming { run } => study_timing(&run).map(|_| ExitCode::SUCCESS),
        Command::VerifyBounds { run } => verify_bounds_cmd(&run),
        Command::VerifyLemmas { max_n, seed, out } => verify_lemmas_cmd(max_n, seed, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
            let _ = e.print();
            return code;
        }
    };
    let name = subcommand_name(&cli.command);
    match dispatch(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n");
            eprintln!("{}", usage_text(name));
            ExitCode::from(1)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            if e.is_numeric() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

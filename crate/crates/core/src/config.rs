// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a problem (built-in benchmark or files on disk), the
//! basis family, Krylov dimensions, horizon, output path and seed.
//!
//! ```json
//! { "builtin": { "name": "schrodinger1d", "n": 100, "eps": 1e-3 },
//!   "family": "besselj", "N": 60, "T": 0.5, "out": "u.json", "seed": 0 }
//! ```
//!
//! An external problem names Matrix Market files and the source terms,
//! either inline or through a bundle file written by
//! [`dump_problem`](crate::bench::dump_problem):
//!
//! ```json
//! { "external": { "matrix": "A.mtx", "u0": "u0.mtx",
//!                 "source": [ { "profile": {"op": "sin", "args": [{"t": null}]},
//!                               "direction": "s.mtx" } ] } }
//! { "external": "bundle/problem.json" }
//! ```
//!
//! Relative paths resolve against the directory of the file that contains them.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::basis::BasisFamily;
use crate::bench::{schrodinger_1d, schrodinger_2d, BenchmarkProblem};
use crate::error::{Error, Result};
use crate::gsource::{Expr, GSource, ProfileTerm};
use crate::linalg::mtx;

/// Names of the built-in benchmarks.
pub const BUILTIN_NAMES: [&str; 2] = ["schrodinger1d", "schrodinger2d"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuiltinProblem {
    pub name: String,
    /// Grid points (1-D) or points per side (2-D).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl BuiltinProblem {
    pub fn build(&self) -> Result<BenchmarkProblem> {
        match self.name.as_str() {
            "schrodinger1d" => schrodinger_1d(self.n.unwrap_or(100), self.eps.unwrap_or(1e-3)),
            "schrodinger2d" => schrodinger_2d(self.n.unwrap_or(32), self.eps.unwrap_or(5e-3)),
            other => Err(Error::contract(format!(
                "unknown builtin problem {other:?}; expected one of {BUILTIN_NAMES:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceTermSpec {
    /// Scalar profile as an expression tree.
    pub profile: Value,
    /// Matrix Market vector file.
    pub direction: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalFiles {
    pub matrix: PathBuf,
    pub u0: PathBuf,
    #[serde(default)]
    pub source: Vec<SourceTermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, rename = "T", skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExternalProblem {
    Bundle(PathBuf),
    Files(ExternalFiles),
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl ExternalFiles {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Loads the files, resolving relative paths against `base`.
    pub fn load(&self, base: &Path) -> Result<BenchmarkProblem> {
        let a = mtx::read_sparse(&resolve(base, &self.matrix))?;
        let u0 = mtx::read_vector(&resolve(base, &self.u0))?;
        let n = a.n();
        if u0.len() != n {
            return Err(Error::contract(format!("u0 has length {}, matrix dimension is {n}", u0.len())));
        }
        let mut terms = Vec::with_capacity(self.source.len());
        for term in &self.source {
            let direction = mtx::read_vector(&resolve(base, &term.direction))?;
            if direction.len() != n {
                return Err(Error::contract(format!(
                    "{}: direction has length {}, matrix dimension is {n}",
                    term.direction.display(),
                    direction.len()
                )));
            }
            terms.push(ProfileTerm::new(Expr::from_json(&term.profile)?, direction));
        }
        let src = if terms.is_empty() { GSource::zero(n) } else { GSource::separable(n, terms)? };
        Ok(BenchmarkProblem {
            a,
            src,
            u0,
            horizon: self.horizon.unwrap_or(1.0),
            label: self.label.clone().unwrap_or_else(|| self.matrix.display().to_string()),
            epsilon: self.epsilon.unwrap_or(f64::NAN),
        })
    }
}

impl ExternalProblem {
    pub fn load(&self, base: &Path) -> Result<BenchmarkProblem> {
        match self {
            ExternalProblem::Files(files) => files.load(base),
            ExternalProblem::Bundle(path) => {
                let path = resolve(base, path);
                let files = ExternalFiles::from_json_str(&read_text(&path)?)?;
                files.load(path.parent().unwrap_or(Path::new(".")))
            }
        }
    }
}

/// Dimension(s) of the Krylov space: one value or a strictly increasing list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Dimensions {
    One(usize),
    List(Vec<usize>),
}

impl Dimensions {
    pub fn as_list(&self) -> Vec<usize> {
        match self {
            Dimensions::One(n) => vec![*n],
            Dimensions::List(v) => v.clone(),
        }
    }
}

/// Families as a single name or a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Families {
    One(BasisFamily),
    List(Vec<BasisFamily>),
}

impl Families {
    pub fn as_list(&self) -> Vec<BasisFamily> {
        match self {
            Families::One(f) => vec![*f],
            Families::List(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<BuiltinProblem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external: Option<ExternalProblem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Families>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub dims: Option<Dimensions>,
    #[serde(default, rename = "T", skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Directory for resolving relative paths; set by [`RunConfig::from_file`].
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Parses and validates a configuration.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_json_str(&read_text(path)?)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Exactly one problem source, positive finite horizon and strictly
    /// increasing positive dimensions.
    pub fn validate(&self) -> Result<()> {
        match (&self.builtin, &self.external) {
            (Some(_), Some(_)) => return Err(Error::contract("configuration names both a builtin and an external problem")),
            (None, None) => return Err(Error::contract("configuration names no problem; give builtin or external")),
            _ => {}
        }
        if let Some(t) = self.horizon {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::contract(format!("T = {t} must be finite and non-negative")));
            }
        }
        if let Some(d) = &self.dims {
            let list = d.as_list();
            if list.is_empty() || list[0] == 0 || list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::contract(format!("N = {list:?} must be positive and strictly increasing")));
            }
        }
        if let Some(Families::List(v)) = &self.family {
            if v.is_empty() {
                return Err(Error::contract("empty family list"));
            }
        }
        Ok(())
    }

    /// Overlays every field set in `flags` onto `self`. A problem given in
    /// `flags` replaces either kind of problem in `self`.
    pub fn overlay(mut self, flags: RunConfig) -> Self {
        if flags.builtin.is_some() || flags.external.is_some() {
            self.builtin = flags.builtin;
            self.external = flags.external;
        }
        self.family = flags.family.or(self.family);
        self.dims = flags.dims.or(self.dims);
        self.horizon = flags.horizon.or(self.horizon);
        self.out = flags.out.or(self.out);
        self.seed = flags.seed.or(self.seed);
        self.base_dir = flags.base_dir.or(self.base_dir);
        self
    }

    /// Builds the problem with horizon `T` if one is set.
    pub fn problem(&self) -> Result<BenchmarkProblem> {
        self.validate()?;
        let base = self.base_dir.clone().unwrap_or_else(|| PathBuf::from("."));
        let p = match (&self.builtin, &self.external) {
            (Some(b), _) => b.build()?,
            (_, Some(e)) => e.load(&base)?,
            _ => unreachable!("validated"),
        };
        Ok(match self.horizon {
            Some(t) => p.with_horizon(t),
            None => p,
        })
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config fields serialize")
    }
}

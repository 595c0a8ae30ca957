//! Experiment configuration: a flat TOML document with the sections
//! `[domain]`, `[basis]`, `[run]` and `[output]`.
//!
//! ```toml
//! [domain]
//! dim = 2
//! bounds = [[0.0, 1.0], [0.0, 1.0]]
//!
//! [basis]
//! family = "spectral-sine"
//! level = 16
//!
//! [run]
//! grid = 33
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Unknown keys are rejected with the offending line and the closest known key.

use std::path::PathBuf;

use toml::{Table, Value};

use crate::basis::{BasisFamily, Factorization, LevelOptions, DEFAULT_MAX_N};
use crate::energy::SearchOptions;
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::netlab::QuantityKind;

const SECTIONS: [(&str, &[&str]); 4] = [
    ("domain", &["dim", "bounds"]),
    (
        "basis",
        &["family", "level", "levels", "quadrature", "max_n"],
    ),
    (
        "run",
        &[
            "quantity", "q", "axis", "exponent", "grid", "tol", "tie_tol", "max_iter", "solver",
            "rhs", "mode", "samples", "checks", "threads",
        ],
    ),
    ("output", &["dir", "grid_csv", "dump_matrices"]),
];

/// Right-hand sides for `solve`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rhs {
    Zero,
    One,
    /// The `k`-th basis function (1-based) scaled by its eigenvalue.
    Eigenmode(usize),
}

impl Rhs {
    pub fn parse(name: &str, mode: Option<usize>) -> Result<Self> {
        match name {
            "zero" => Ok(Rhs::Zero),
            "one" => Ok(Rhs::One),
            "eigenmode" => {
                let k = mode.unwrap_or(1);
                if k == 0 {
                    return Err(Error::Config("eigenmode index is 1-based".into()));
                }
                Ok(Rhs::Eigenmode(k))
            }
            other => Err(Error::Config(format!(
                "unknown right-hand side `{other}` (expected zero, one or eigenmode)"
            ))),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Rhs::Zero => "zero".into(),
            Rhs::One => "one".into(),
            Rhs::Eigenmode(k) => format!("eigenmode-{k}"),
        }
    }
}

/// Settings as read from a file and/or command-line flags, before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub dim: Option<usize>,
    pub bounds: Option<Vec<[f64; 2]>>,
    pub family: Option<String>,
    pub level: Option<u32>,
    pub levels: Option<Vec<u32>>,
    pub quadrature: Option<usize>,
    pub max_n: Option<usize>,
    pub quantity: Option<String>,
    pub q: Option<Vec<f64>>,
    pub axis: Option<usize>,
    pub exponent: Option<f64>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub tie_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub solver: Option<String>,
    pub rhs: Option<String>,
    pub mode: Option<usize>,
    pub samples: Option<usize>,
    pub checks: Option<usize>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub grid_csv: Option<bool>,
    pub dump_matrices: Option<bool>,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub domain: Domain,
    pub family: BasisFamily,
    pub level: Option<u32>,
    pub levels: Option<Vec<u32>>,
    pub level_options: LevelOptions,
    pub quantity: Option<QuantityKind>,
    pub q: Option<Vec<f64>>,
    pub axis: usize,
    pub exponent: f64,
    pub search: SearchOptions,
    pub rhs: Option<Rhs>,
    pub samples: usize,
    pub checks: usize,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
    pub grid_csv: bool,
    pub dump_matrices: bool,
}

fn line_of(text: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            current = Some(t.trim_matches(|c| c == '[' || c == ']').trim().to_string());
            if section.is_none() && current.as_deref() == Some(key) {
                return Some(i + 1);
            }
            continue;
        }
        if current.as_deref() != section {
            continue;
        }
        if let Some(rest) = t.strip_prefix(key) {
            if rest.trim_start().starts_with('=') {
                return Some(i + 1);
            }
        }
    }
    None
}

fn at(text: &str, section: Option<&str>, key: &str, msg: String) -> Error {
    match line_of(text, section, key) {
        Some(l) => Error::Config(format!("line {l}: {msg}")),
        None => Error::Config(msg),
    }
}

fn suggestion(unknown: &str, known: &[&str]) -> String {
    known
        .iter()
        .map(|k| (strsim::levenshtein(unknown, k), *k))
        .filter(|(d, _)| *d <= 2)
        .min()
        .map(|(_, k)| format!(" (did you mean `{k}`?)"))
        .unwrap_or_default()
}

struct Reader<'t> {
    text: &'t str,
    section: &'static str,
    table: Option<&'t Table>,
}

impl Reader<'_> {
    fn err(&self, key: &str, what: &str) -> Error {
        at(
            self.text,
            Some(self.section),
            key,
            format!("[{}].{key} must be {what}", self.section),
        )
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.table.and_then(|t| t.get(key))
    }

    fn uint(&self, key: &str) -> Result<Option<usize>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(_) => Err(self.err(key, "a nonnegative integer")),
        }
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(*f)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(_) => Err(self.err(key, "a number")),
        }
    }

    fn string(&self, key: &str) -> Result<Option<String>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(self.err(key, "a string")),
        }
    }

    fn boolean(&self, key: &str) -> Result<Option<bool>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(_) => Err(self.err(key, "true or false")),
        }
    }

    fn floats(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| match v {
                    Value::Float(f) => Ok(*f),
                    Value::Integer(i) => Ok(*i as f64),
                    _ => Err(self.err(key, "an array of numbers")),
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
            Some(_) => Err(self.err(key, "an array of numbers")),
        }
    }
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string().trim_end().to_string()))?;
        let section_names: Vec<&str> = SECTIONS.iter().map(|(s, _)| *s).collect();
        for (name, value) in &doc {
            let Some((_, keys)) = SECTIONS.iter().find(|(s, _)| s == name) else {
                return Err(at(
                    text,
                    None,
                    name,
                    format!(
                        "unknown section `{name}`{}",
                        suggestion(name, &section_names)
                    ),
                ));
            };
            let Value::Table(t) = value else {
                return Err(Error::Config(format!("`{name}` must be a section")));
            };
            for key in t.keys() {
                if !keys.contains(&key.as_str()) {
                    return Err(at(
                        text,
                        Some(name),
                        key,
                        format!("unknown key `{key}` in [{name}]{}", suggestion(key, keys)),
                    ));
                }
            }
        }
        let section = |name: &'static str| Reader {
            text,
            section: name,
            table: doc.get(name).and_then(Value::as_table),
        };

        let dom = section("domain");
        let bounds = match dom.get("bounds") {
            None => None,
            Some(Value::Array(axes)) => Some(
                axes.iter()
                    .map(|axis| match axis.as_array().map(|a| a.as_slice()) {
                        Some([lo, hi]) => {
                            let num = |v: &Value| {
                                v.as_float().or_else(|| v.as_integer().map(|i| i as f64))
                            };
                            match (num(lo), num(hi)) {
                                (Some(lo), Some(hi)) => Ok([lo, hi]),
                                _ => Err(dom.err("bounds", "a list of [lower, upper] pairs")),
                            }
                        }
                        _ => Err(dom.err("bounds", "a list of [lower, upper] pairs")),
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
            Some(_) => return Err(dom.err("bounds", "a list of [lower, upper] pairs")),
        };

        let basis = section("basis");
        let level = basis
            .uint("level")?
            .map(|l| u32::try_from(l).map_err(|_| basis.err("level", "a small integer")))
            .transpose()?;
        let levels = basis
            .floats("levels")?
            .map(|ls| {
                ls.into_iter()
                    .map(|l| {
                        if l >= 0.0 && l.fract() == 0.0 && l <= u32::MAX as f64 {
                            Ok(l as u32)
                        } else {
                            Err(basis.err("levels", "a list of nonnegative integers"))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;

        let run = section("run");
        let out = section("output");
        Ok(RawConfig {
            dim: dom.uint("dim")?,
            bounds,
            family: basis.string("family")?,
            level,
            levels,
            quadrature: basis.uint("quadrature")?,
            max_n: basis.uint("max_n")?,
            quantity: run.string("quantity")?,
            q: run.floats("q")?,
            axis: run.uint("axis")?,
            exponent: run.float("exponent")?,
            grid: run.uint("grid")?,
            tol: run.float("tol")?,
            tie_tol: run.float("tie_tol")?,
            max_iter: run.uint("max_iter")?,
            solver: run.string("solver")?,
            rhs: run.string("rhs")?,
            mode: run.uint("mode")?,
            samples: run.uint("samples")?,
            checks: run.uint("checks")?,
            threads: run.uint("threads")?,
            out_dir: out.string("dir")?.map(PathBuf::from),
            grid_csv: out.boolean("grid_csv")?,
            dump_matrices: out.boolean("dump_matrices")?,
        })
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merge(self, other: RawConfig) -> RawConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RawConfig { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            dim,
            bounds,
            family,
            level,
            levels,
            quadrature,
            max_n,
            quantity,
            q,
            axis,
            exponent,
            grid,
            tol,
            tie_tol,
            max_iter,
            solver,
            rhs,
            mode,
            samples,
            checks,
            threads,
            out_dir,
            grid_csv,
            dump_matrices
        )
    }

    pub fn validate(self) -> Result<ExperimentConfig> {
        let bounds = self
            .bounds
            .ok_or_else(|| Error::Config("[domain].bounds is required".into()))?;
        if let Some(dim) = self.dim {
            if dim != bounds.len() {
                return Err(Error::Config(format!(
                    "[domain].dim is {dim} but {} axis bounds were given",
                    bounds.len()
                )));
            }
        }
        let lower: Vec<f64> = bounds.iter().map(|b| b[0]).collect();
        let upper: Vec<f64> = bounds.iter().map(|b| b[1]).collect();
        let domain = Domain::new(&lower, &upper).map_err(|e| Error::Config(e.to_string()))?;

        let family: BasisFamily = self
            .family
            .as_deref()
            .ok_or_else(|| Error::Config("[basis].family is required".into()))?
            .parse()
            .map_err(|e: Error| Error::Config(e.to_string()))?;

        if self.level == Some(0) {
            return Err(Error::Config("[basis].level must be at least 1".into()));
        }
        if let Some(ls) = &self.levels {
            if ls.is_empty() {
                return Err(Error::Config("[basis].levels must not be empty".into()));
            }
            if ls.contains(&0) {
                return Err(Error::Config("[basis].levels must be at least 1".into()));
            }
            if ls.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config(
                    "[basis].levels must be strictly increasing".into(),
                ));
            }
        }
        let max_n = self.max_n.unwrap_or(DEFAULT_MAX_N);
        if max_n == 0 {
            return Err(Error::Config("[basis].max_n must be positive".into()));
        }
        if self.quadrature == Some(0) {
            return Err(Error::Config("[basis].quadrature must be positive".into()));
        }
        let factorization = match self.solver.as_deref() {
            None | Some("banded") => Factorization::Banded,
            Some("dense") => Factorization::Dense,
            Some(other) => {
                return Err(Error::Config(format!(
                    "[run].solver must be `banded` or `dense`, got `{other}`"
                )))
            }
        };

        let quantity = self
            .quantity
            .as_deref()
            .map(str::parse::<QuantityKind>)
            .transpose()
            .map_err(|e| Error::Config(e.to_string()))?;
        if let Some(q) = &self.q {
            if q.len() != domain.dim() {
                return Err(Error::Config(format!(
                    "[run].q has {} coordinates but the domain has dimension {}",
                    q.len(),
                    domain.dim()
                )));
            }
        }
        let axis = self.axis.unwrap_or(0);
        if axis >= domain.dim() {
            return Err(Error::Config(format!("[run].axis {axis} out of range")));
        }
        let exponent = self.exponent.unwrap_or(0.0);
        if !(exponent >= 0.0) {
            return Err(Error::Config("[run].exponent must be nonnegative".into()));
        }

        let defaults = SearchOptions::default();
        let search = SearchOptions {
            grid: self.grid.unwrap_or(defaults.grid),
            tol: self.tol.unwrap_or(defaults.tol),
            tie_tol: self.tie_tol.unwrap_or(defaults.tie_tol),
            max_iter: self.max_iter.unwrap_or(defaults.max_iter),
        };
        if search.grid < 2 {
            return Err(Error::Config("[run].grid must be at least 2".into()));
        }
        if !(search.tol > 0.0) {
            return Err(Error::Config("[run].tol must be positive".into()));
        }
        if !(search.tie_tol >= 0.0) {
            return Err(Error::Config("[run].tie_tol must be nonnegative".into()));
        }
        if search.max_iter == 0 {
            return Err(Error::Config("[run].max_iter must be positive".into()));
        }
        let rhs = self
            .rhs
            .as_deref()
            .map(|r| Rhs::parse(r, self.mode))
            .transpose()?;
        let samples = self.samples.unwrap_or(101);
        if samples < 2 {
            return Err(Error::Config("[run].samples must be at least 2".into()));
        }
        let checks = self.checks.unwrap_or(100);
        if checks == 0 {
            return Err(Error::Config("[run].checks must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("[run].threads must be positive".into()));
        }

        Ok(ExperimentConfig {
            domain,
            family,
            level: self.level,
            levels: self.levels,
            level_options: LevelOptions {
                max_n,
                factorization,
                quadrature: self.quadrature,
            },
            quantity,
            q: self.q,
            axis,
            exponent,
            search,
            rhs,
            samples,
            checks,
            threads: self.threads,
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("out")),
            grid_csv: self.grid_csv.unwrap_or(false),
            dump_matrices: self.dump_matrices.unwrap_or(false),
        })
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    RawConfig::from_toml(text)?.validate()
}

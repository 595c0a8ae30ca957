//! Experiment orchestration for the `ultrafn` binary: configuration, the
//! `solve | minimize | sweep | check` commands and their output files.

pub mod check;
pub mod config;
pub mod output;

use std::path::PathBuf;

use serde::Serialize;

use crate::basis::{BasisFamily, SpaceLevel};
use crate::energy::{grid_scan, minimize, MinimizerResult};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::netlab::{fit_net, run_net, NetSetup, Quantity, QuantityKind};
use crate::solver::{solve_point_source, solve_poisson, DirichletSolution};
use crate::ultra::Ultrafunction;

pub use config::{parse_config, ExperimentConfig, RawConfig, Rhs};
use output::{fmt_num, write_json, write_sidecar, Csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Minimize,
    Sweep,
    Check,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Minimize => "minimize",
            Command::Sweep => "sweep",
            Command::Check => "check",
        }
    }
}

/// What a run produced.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    /// Payload files, in the order written.
    pub outputs: Vec<PathBuf>,
    pub sidecar: Option<PathBuf>,
    /// Failed invariant checks (only `check` sets this).
    pub failed_checks: usize,
}

fn require_level(cfg: &ExperimentConfig) -> Result<u32> {
    cfg.level
        .ok_or_else(|| Error::Config("a level is required ([basis].level or --level)".into()))
}

fn build_level(cfg: &ExperimentConfig) -> Result<SpaceLevel> {
    SpaceLevel::build_with(
        &cfg.domain,
        cfg.family,
        require_level(cfg)?,
        cfg.level_options,
    )
}

fn config_point(cfg: &ExperimentConfig) -> Result<Option<Point>> {
    cfg.q.as_deref().map(Point::new).transpose()
}

fn coord_headers(dim: usize) -> Vec<&'static str> {
    ["x", "y"][..dim].to_vec()
}

pub fn run(cfg: &ExperimentConfig, command: Command, seed: u64) -> Result<RunReport> {
    let mut report = match command {
        Command::Solve => run_solve(cfg)?,
        Command::Minimize => run_minimize(cfg)?,
        Command::Sweep => run_sweep(cfg)?,
        Command::Check => run_check(cfg, seed)?,
    };
    report.sidecar = Some(write_sidecar(
        &cfg.out_dir,
        command.name(),
        &report.outputs,
    )?);
    Ok(report)
}

#[derive(Serialize)]
struct SolveSummary {
    family: BasisFamily,
    level: u32,
    n: usize,
    problem: String,
    q: Option<Vec<f64>>,
    elastic: f64,
    point_value: Option<f64>,
    total: Option<f64>,
    residual: f64,
}

fn rhs_solution<'a>(level: &'a SpaceLevel, rhs: Rhs) -> Result<DirichletSolution<'a>> {
    match rhs {
        Rhs::Zero => solve_poisson(level, |_| 0.0),
        Rhs::One => solve_poisson(level, |_| 1.0),
        Rhs::Eigenmode(k) => {
            if !level.is_orthonormal() {
                return Err(Error::Unsupported {
                    op: "eigenmode right-hand side",
                    family: level.family().name(),
                });
            }
            let e = Ultrafunction::basis_function(level, k - 1)?;
            let mu = level.stiffness().get(k - 1, k - 1);
            solve_poisson(level, move |p| mu * e.evaluate(p).unwrap_or(0.0))
        }
    }
}

fn run_solve(cfg: &ExperimentConfig) -> Result<RunReport> {
    let level = build_level(cfg)?;
    let q = config_point(cfg)?;
    let (sol, problem) = match (q, cfg.rhs) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "give either a point source (q) or a right-hand side (rhs), not both".into(),
            ))
        }
        (Some(q), None) => (solve_point_source(&level, &q)?, "point-source".to_string()),
        (None, Some(rhs)) => (
            rhs_solution(&level, rhs)?,
            format!("poisson:{}", rhs.label()),
        ),
        (None, None) => {
            return Err(Error::Config(
                "solve needs a point source (q) or a right-hand side (rhs)".into(),
            ))
        }
    };
    let dim = cfg.domain.dim();
    let mut header = coord_headers(dim);
    header.push("u");
    let mut csv = Csv::new(&header);
    for p in cfg.domain.grid(cfg.samples) {
        let mut row: Vec<String> = p.coords().iter().map(|&c| fmt_num(c)).collect();
        row.push(fmt_num(sol.u.evaluate(&p)?));
        csv.row(&row);
    }
    let csv_path = cfg.out_dir.join("solve.csv");
    csv.write(&csv_path)?;
    let json_path = cfg.out_dir.join("solve.json");
    write_json(
        &json_path,
        &SolveSummary {
            family: level.family(),
            level: level.level(),
            n: level.n(),
            problem,
            q: sol.q.map(|p| p.coords().to_vec()),
            elastic: sol.elastic,
            point_value: sol.point_value,
            total: sol.point_value.map(|v| v + sol.elastic),
            residual: sol.residual,
        },
    )?;
    let mut outputs = vec![csv_path, json_path];
    if cfg.dump_matrices {
        const DUMP_LIMIT: usize = 4096;
        if level.n() > DUMP_LIMIT {
            return Err(Error::InvalidArgument(format!(
                "matrix dump limited to n <= {DUMP_LIMIT}, level has {}",
                level.n()
            )));
        }
        for (name, m) in [
            ("gram.csv", level.gram()),
            ("stiffness.csv", level.stiffness()),
        ] {
            let cols: Vec<String> = (0..level.n()).map(|j| format!("c{j}")).collect();
            let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
            let mut csv = Csv::new(&refs);
            for row in m.to_dense() {
                csv.row(&row.into_iter().map(fmt_num).collect::<Vec<_>>());
            }
            let path = cfg.out_dir.join(name);
            csv.write(&path)?;
            outputs.push(path);
        }
    }
    Ok(RunReport {
        outputs,
        ..RunReport::default()
    })
}

fn run_minimize(cfg: &ExperimentConfig) -> Result<RunReport> {
    let level = build_level(cfg)?;
    let result: MinimizerResult = minimize(&level, &cfg.search)?;
    let json_path = cfg.out_dir.join("minimize.json");
    write_json(&json_path, &result)?;
    let mut outputs = vec![json_path];
    if cfg.grid_csv {
        let mut header = coord_headers(cfg.domain.dim());
        header.push("F");
        let mut csv = Csv::new(&header);
        for (p, f) in grid_scan(&level, cfg.search.grid)? {
            let mut row: Vec<String> = p.coords().iter().map(|&c| fmt_num(c)).collect();
            row.push(fmt_num(f));
            csv.row(&row);
        }
        let path = cfg.out_dir.join("minimize_grid.csv");
        csv.write(&path)?;
        outputs.push(path);
    }
    Ok(RunReport {
        outputs,
        ..RunReport::default()
    })
}

/// Default schedule: powers of two for spectral (modes per axis), `1..=6`
/// doublings for P1.
pub fn default_levels(family: BasisFamily, dim: usize) -> Vec<u32> {
    match (family, dim) {
        (BasisFamily::SpectralSine, 1) => (4..=10).map(|e| 1 << e).collect(),
        (BasisFamily::SpectralSine, _) => (3..=7).map(|e| 1 << e).collect(),
        (BasisFamily::FemP1, 1) => (3..=10).collect(),
        (BasisFamily::FemP1, _) => (2..=6).collect(),
    }
}

pub fn quantity_from_config(cfg: &ExperimentConfig) -> Result<Quantity> {
    let kind = cfg.quantity.ok_or_else(|| {
        Error::Config("sweep needs a quantity ([run].quantity or --quantity)".into())
    })?;
    let point = || {
        config_point(cfg)?
            .ok_or_else(|| Error::Config("this quantity needs a point ([run].q or --q)".into()))
    };
    Ok(match kind {
        QuantityKind::EnergyAtFixedQ => Quantity::EnergyAtFixedQ(point()?),
        QuantityKind::MinEnergy => Quantity::MinEnergy,
        QuantityKind::MinimizerCoordinate => Quantity::MinimizerCoordinate(cfg.axis),
        QuantityKind::DeltaSelfEnergy => Quantity::DeltaSelfEnergy(point()?),
        QuantityKind::ElectrostaticAtFixedQ => Quantity::ElectrostaticAtFixedQ(point()?),
        QuantityKind::ElectrostaticAtScaledQ => Quantity::ElectrostaticAtScaledQ(cfg.exponent),
    })
}

#[derive(Serialize)]
struct SweepSummary {
    quantity: &'static str,
    family: BasisFamily,
    exponent: Option<f64>,
    model: crate::netlab::NetModel,
    alpha: f64,
    beta: f64,
    power: f64,
    rsq: f64,
    classification: crate::netlab::Classification,
    levels: Vec<u32>,
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<RunReport> {
    let quantity = quantity_from_config(cfg)?;
    let levels = cfg
        .levels
        .clone()
        .or_else(|| cfg.level.map(|l| vec![l]))
        .unwrap_or_else(|| default_levels(cfg.family, cfg.domain.dim()));
    let setup = NetSetup {
        family: cfg.family,
        domain: cfg.domain,
        level_options: cfg.level_options,
        search: cfg.search,
    };
    let samples = run_net(&setup, &quantity, &levels)?;
    let mut csv = Csv::new(&["level", "n", "value"]);
    for s in &samples {
        csv.row(&[s.level.to_string(), s.n.to_string(), fmt_num(s.value)]);
    }
    let csv_path = cfg.out_dir.join("sweep.csv");
    csv.write(&csv_path)?;
    let fit = fit_net(&samples)?;
    let json_path = cfg.out_dir.join("sweep.json");
    write_json(
        &json_path,
        &SweepSummary {
            quantity: quantity.name(),
            family: cfg.family,
            exponent: match quantity {
                Quantity::ElectrostaticAtScaledQ(e) => Some(e),
                _ => None,
            },
            model: fit.model,
            alpha: fit.alpha,
            beta: fit.beta,
            power: fit.exponent,
            rsq: fit.rsq,
            classification: fit.classification,
            levels,
        },
    )?;
    Ok(RunReport {
        outputs: vec![csv_path, json_path],
        ..RunReport::default()
    })
}

#[derive(Serialize)]
struct CheckSummary {
    family: BasisFamily,
    level: u32,
    n: usize,
    seed: u64,
    passed: usize,
    failed: usize,
    checks: Vec<check::CheckOutcome>,
}

fn run_check(cfg: &ExperimentConfig, seed: u64) -> Result<RunReport> {
    let level = build_level(cfg)?;
    let outcomes = check::run_checks(&level, cfg.checks, seed)?;
    let failed = outcomes.iter().filter(|c| c.failed > 0).count();
    let path = cfg.out_dir.join("check.json");
    write_json(
        &path,
        &CheckSummary {
            family: level.family(),
            level: level.level(),
            n: level.n(),
            seed,
            passed: outcomes.len() - failed,
            failed,
            checks: outcomes,
        },
    )?;
    Ok(RunReport {
        outputs: vec![path],
        sidecar: None,
        failed_checks: failed,
    })
}

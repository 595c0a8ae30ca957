use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ultrafn::cli::{self, Command, RawConfig};
use ultrafn::{Error, Result};

/// Point-mass membrane experiments on nested Galerkin levels.
#[derive(Parser)]
#[command(name = "ultrafn", version)]
struct Cli {
    /// TOML experiment file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for level and grid evaluation.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for the randomized `check` suite.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Solve a level Dirichlet problem and sample the solution.
    Solve(Flags),
    /// Locate the minimum of the energy over the point position.
    Minimize(Flags),
    /// Evaluate a quantity along a level schedule and classify it.
    Sweep(Flags),
    /// Run the randomized invariant suite on one level.
    Check(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// `spectral-sine` or `fem-p1`.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    level: Option<u32>,
    /// Comma-separated increasing level schedule.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<u32>>,
    /// Lower corner, comma separated (one value per axis).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lower: Option<Vec<f64>>,
    /// Upper corner, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    upper: Option<Vec<f64>>,
    /// Point-source position, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    q: Option<Vec<f64>>,
    /// Right-hand side: `zero`, `one` or `eigenmode`.
    #[arg(long)]
    rhs: Option<String>,
    /// Mode index for `--rhs eigenmode` (1-based).
    #[arg(long)]
    mode: Option<usize>,
    #[arg(long)]
    quantity: Option<String>,
    #[arg(long)]
    axis: Option<usize>,
    #[arg(long)]
    exponent: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    tie_tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// `banded` or `dense`.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    quadrature: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    checks: Option<usize>,
    /// Also write the coarse grid of energies.
    #[arg(long)]
    grid_csv: bool,
    /// Also write the Gram and stiffness matrices.
    #[arg(long)]
    dump_matrices: bool,
}

impl Flags {
    fn into_raw(self) -> Result<RawConfig> {
        let bounds = match (self.lower, self.upper) {
            (None, None) => None,
            (Some(lo), Some(hi)) if lo.len() == hi.len() => {
                Some(lo.into_iter().zip(hi).map(|(a, b)| [a, b]).collect())
            }
            (Some(_), Some(_)) => {
                return Err(Error::Config("--lower and --upper differ in length".into()))
            }
            _ => return Err(Error::Config("--lower and --upper go together".into())),
        };
        Ok(RawConfig {
            bounds,
            family: self.family,
            level: self.level,
            levels: self.levels,
            quadrature: self.quadrature,
            max_n: self.max_n,
            quantity: self.quantity,
            q: self.q,
            axis: self.axis,
            exponent: self.exponent,
            grid: self.grid,
            tol: self.tol,
            tie_tol: self.tie_tol,
            max_iter: self.max_iter,
            solver: self.solver,
            rhs: self.rhs,
            mode: self.mode,
            samples: self.samples,
            checks: self.checks,
            grid_csv: self.grid_csv.then_some(true),
            dump_matrices: self.dump_matrices.then_some(true),
            ..RawConfig::default()
        })
    }
}

fn execute(args: Cli) -> Result<usize> {
    let (command, flags) = match args.command {
        Sub::Solve(f) => (Command::Solve, f),
        Sub::Minimize(f) => (Command::Minimize, f),
        Sub::Sweep(f) => (Command::Sweep, f),
        Sub::Check(f) => (Command::Check, f),
    };
    let base = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            RawConfig::from_toml(&text)?
        }
        None => RawConfig::default(),
    };
    let mut overrides = flags.into_raw()?;
    overrides.out_dir = args.out;
    overrides.threads = args.threads;
    let cfg = base.merge(overrides).validate()?;

    let report = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(|| cli::run(&cfg, command, args.seed))?,
        None => cli::run(&cfg, command, args.seed)?,
    };
    for path in &report.outputs {
        println!("{}", path.display());
    }
    Ok(report.failed_checks)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failed) => {
            eprintln!(
                "{}",
                json!({ "error": format!("{failed} invariant checks failed"), "kind": "check_failed" })
            );
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string(), "kind": e.kind() }));
            ExitCode::from(2)
        }
    }
}

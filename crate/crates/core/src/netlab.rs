//! Scalar quantities sampled along the level chain, asymptotic fits and the
//! infinitesimal / finite / infinite classification.
//!
//! A net is fitted against `r`, the number of basis functions per axis
//! (`n = r^dim`). The fitted `(model, alpha, beta)` is the computable stand-in
//! for the limit: `alpha` is the coefficient of the divergent gauge (`ln r` or
//! `r^p`) and `beta` the finite part.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{BasisFamily, LevelOptions, SpaceLevel};
use crate::energy::{energy_at, minimize, SearchOptions};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::ultra::delta_self_energy;

/// Relative spread of the last [`FINITE_WINDOW`] samples below which a net
/// counts as finite.
pub const FINITE_SPREAD: f64 = 1e-3;
pub const FINITE_WINDOW: usize = 3;
/// Goodness of fit a divergent model needs for an infinite classification.
pub const DIVERGENT_RSQ: f64 = 0.99;
/// Required growth `|last| / |first|` for an infinite classification.
pub const DIVERGENT_GROWTH: f64 = 1.1;
/// Magnitude below which a decreasing net counts as infinitesimal.
pub const INFINITESIMAL_BOUND: f64 = 1e-6;
/// Power exponents closer to zero than this are left to the log model.
const LOG_LIKE_EXPONENT: f64 = 0.1;
pub const MIN_SAMPLES: usize = 4;
const SELECTION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    EnergyAtFixedQ(Point),
    MinEnergy,
    MinimizerCoordinate(usize),
    DeltaSelfEnergy(Point),
    ElectrostaticAtFixedQ(Point),
    /// Electrostatic energy at distance `(L_0 / 2) n^-exponent` from the
    /// midpoint of the lower face of axis 0.
    ElectrostaticAtScaledQ(f64),
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::EnergyAtFixedQ(_) => "energy-at-fixed-q",
            Quantity::MinEnergy => "min-energy",
            Quantity::MinimizerCoordinate(_) => "minimizer-coordinate",
            Quantity::DeltaSelfEnergy(_) => "delta-self-energy",
            Quantity::ElectrostaticAtFixedQ(_) => "electrostatic-at-fixed-q",
            Quantity::ElectrostaticAtScaledQ(_) => "electrostatic-at-scaled-q",
        }
    }
}

/// Quantity names without their parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantityKind {
    EnergyAtFixedQ,
    MinEnergy,
    MinimizerCoordinate,
    DeltaSelfEnergy,
    ElectrostaticAtFixedQ,
    ElectrostaticAtScaledQ,
}

impl QuantityKind {
    pub const ALL: [&'static str; 6] = [
        "energy-at-fixed-q",
        "min-energy",
        "minimizer-coordinate",
        "delta-self-energy",
        "electrostatic-at-fixed-q",
        "electrostatic-at-scaled-q",
    ];
}

impl FromStr for QuantityKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "energy-at-fixed-q" => QuantityKind::EnergyAtFixedQ,
            "min-energy" => QuantityKind::MinEnergy,
            "minimizer-coordinate" => QuantityKind::MinimizerCoordinate,
            "delta-self-energy" => QuantityKind::DeltaSelfEnergy,
            "electrostatic-at-fixed-q" => QuantityKind::ElectrostaticAtFixedQ,
            "electrostatic-at-scaled-q" => QuantityKind::ElectrostaticAtScaledQ,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown quantity `{other}` (expected one of {})",
                    Self::ALL.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NetSample {
    pub level: u32,
    pub n: usize,
    /// Basis functions per axis.
    pub resolution: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetModel {
    /// Tends to `beta`; `alpha r^exponent` (exponent < 0) is the correction.
    Constant,
    /// `alpha ln r + beta`.
    LogDivergent,
    /// `alpha r^exponent + beta` with exponent > 0.
    PowerDivergent,
    /// `beta r^exponent` with exponent < 0.
    Vanishing,
}

impl NetModel {
    pub fn is_divergent(&self) -> bool {
        matches!(self, NetModel::LogDivergent | NetModel::PowerDivergent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Infinitesimal,
    Finite,
    Infinite,
    Undetermined,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Infinitesimal => "infinitesimal",
            Classification::Finite => "finite",
            Classification::Infinite => "infinite",
            Classification::Undetermined => "undetermined",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetFit {
    pub samples: Vec<NetSample>,
    pub model: NetModel,
    pub alpha: f64,
    pub beta: f64,
    pub exponent: f64,
    pub rsq: f64,
    pub classification: Classification,
}

/// Where a net lives: family, domain and per-level settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetSetup {
    pub family: BasisFamily,
    pub domain: Domain,
    pub level_options: LevelOptions,
    pub search: SearchOptions,
}

impl NetSetup {
    pub fn new(family: BasisFamily, domain: Domain) -> Self {
        NetSetup {
            family,
            domain,
            level_options: LevelOptions::default(),
            search: SearchOptions::default(),
        }
    }
}

/// Point at distance `(L_0 / 2) n^-exponent` from the lower face of axis 0,
/// centred along the other axes. An infinite exponent lands on the face.
pub fn scaled_point(domain: &Domain, n: usize, exponent: f64) -> Point {
    let d = if exponent.is_infinite() {
        0.0
    } else {
        0.5 * domain.side(0) * (n as f64).powf(-exponent)
    };
    domain.center().with_coord(0, domain.lower()[0] + d)
}

fn sample_level(setup: &NetSetup, quantity: &Quantity, level: u32) -> Result<NetSample> {
    let s = SpaceLevel::build_with(&setup.domain, setup.family, level, setup.level_options)?;
    let value = match quantity {
        Quantity::EnergyAtFixedQ(q) => energy_at(&s, q)?.total,
        Quantity::ElectrostaticAtFixedQ(q) => energy_at(&s, q)?.electrostatic,
        Quantity::MinEnergy => minimize(&s, &setup.search)?.f_min,
        Quantity::MinimizerCoordinate(axis) => {
            if *axis >= setup.domain.dim() {
                return Err(Error::InvalidArgument(format!("axis {axis} out of range")));
            }
            minimize(&s, &setup.search)?.q_min[*axis]
        }
        Quantity::DeltaSelfEnergy(q) => delta_self_energy(&s, q)?,
        Quantity::ElectrostaticAtScaledQ(exponent) => {
            energy_at(&s, &scaled_point(&setup.domain, s.n(), *exponent))?.electrostatic
        }
    };
    Ok(NetSample {
        level,
        n: s.n(),
        resolution: s.per_axis(),
        value,
    })
}

pub fn run_net(setup: &NetSetup, quantity: &Quantity, levels: &[u32]) -> Result<Vec<NetSample>> {
    if levels.is_empty() {
        return Err(Error::InvalidArgument("level schedule is empty".into()));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "levels must be strictly increasing".into(),
        ));
    }
    if let Quantity::ElectrostaticAtScaledQ(e) = quantity {
        if !(*e >= 0.0) {
            return Err(Error::InvalidArgument(
                "exponent must be nonnegative".into(),
            ));
        }
    }
    // check the cap up front so no work is wasted on a schedule that fails
    for &l in levels {
        let n = setup
            .family
            .per_axis(l)?
            .saturating_pow(setup.domain.dim() as u32);
        if n > setup.level_options.max_n {
            return Err(Error::ResourceLimit {
                n,
                cap: setup.level_options.max_n,
            });
        }
    }
    levels
        .par_iter()
        .map(|&l| sample_level(setup, quantity, l))
        .collect()
}

struct Candidate {
    model: NetModel,
    alpha: f64,
    beta: f64,
    exponent: f64,
    rsq: f64,
    params: usize,
}

/// Least-squares line through `(x, y)`: `(slope, intercept)`.
fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

fn r_squared(y: &[f64], pred: impl Iterator<Item = f64>) -> f64 {
    let my = y.iter().sum::<f64>() / y.len() as f64;
    let tot: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let res: f64 = y.iter().zip(pred).map(|(v, p)| (v - p) * (v - p)).sum();
    if tot == 0.0 {
        if res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        (1.0 - res / tot).max(0.0)
    }
}

fn adjusted(c: &Candidate, n: usize) -> f64 {
    if n <= c.params {
        return f64::NEG_INFINITY;
    }
    1.0 - (1.0 - c.rsq) * (n - 1) as f64 / (n - c.params) as f64
}

fn candidates(r: &[f64], v: &[f64]) -> Vec<Candidate> {
    let n = v.len();
    let lnr: Vec<f64> = r.iter().map(|x| x.ln()).collect();
    let mean = v.iter().sum::<f64>() / n as f64;
    let mut out = vec![Candidate {
        model: NetModel::Constant,
        alpha: 0.0,
        beta: mean,
        exponent: 0.0,
        rsq: 0.0,
        params: 1,
    }];

    let (a, b) = linear_fit(&lnr, v);
    out.push(Candidate {
        model: NetModel::LogDivergent,
        alpha: a,
        beta: b,
        exponent: 0.0,
        rsq: r_squared(v, lnr.iter().map(|x| a * x + b)),
        params: 2,
    });

    // exponent from the decay or growth of successive differences
    let diffs: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let same_sign = diffs.iter().all(|d| *d > 0.0) || diffs.iter().all(|d| *d < 0.0);
    if n >= 3 && same_sign {
        let ld: Vec<f64> = diffs.iter().map(|d| d.abs().ln()).collect();
        let (p, _) = linear_fit(&lnr[1..], &ld);
        if p.is_finite() && p.abs() >= LOG_LIKE_EXPONENT {
            let g: Vec<f64> = r.iter().map(|x| x.powf(p)).collect();
            let (a, b) = linear_fit(&g, v);
            out.push(Candidate {
                model: if p > 0.0 {
                    NetModel::PowerDivergent
                } else {
                    NetModel::Constant
                },
                alpha: a,
                beta: b,
                exponent: p,
                rsq: r_squared(v, g.iter().map(|x| a * x + b)),
                params: 3,
            });
        }
    }

    let positive = v.iter().all(|x| *x > 0.0);
    let negative = v.iter().all(|x| *x < 0.0);
    if positive || negative {
        let sign = if positive { 1.0 } else { -1.0 };
        let lv: Vec<f64> = v.iter().map(|x| x.abs().ln()).collect();
        let (s, c) = linear_fit(&lnr, &lv);
        if s < 0.0 {
            let beta = sign * c.exp();
            out.push(Candidate {
                model: NetModel::Vanishing,
                alpha: 0.0,
                beta,
                exponent: s,
                rsq: r_squared(v, r.iter().map(|x| beta * x.powf(s))),
                params: 2,
            });
        }
    }
    out
}

fn classify(values: &[f64], model: NetModel, rsq: f64) -> Classification {
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    let first = abs[0];
    let last = *abs.last().unwrap();
    if last <= INFINITESIMAL_BOUND && abs.windows(2).all(|w| w[1] <= w[0]) {
        return Classification::Infinitesimal;
    }
    if model.is_divergent() && rsq >= DIVERGENT_RSQ && last >= DIVERGENT_GROWTH * first {
        return Classification::Infinite;
    }
    let window = &values[values.len().saturating_sub(FINITE_WINDOW)..];
    let hi = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = window.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = window.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale == 0.0 || (hi - lo) / scale <= FINITE_SPREAD {
        return Classification::Finite;
    }
    Classification::Undetermined
}

pub fn fit_net(samples: &[NetSample]) -> Result<NetFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "fitting needs at least {MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples
        .windows(2)
        .any(|w| w[0].level >= w[1].level || w[0].n >= w[1].n)
    {
        return Err(Error::InvalidArgument(
            "samples must have strictly increasing levels and dimensions".into(),
        ));
    }
    let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("net value {v}")));
    }
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Ok(NetFit {
            samples: samples.to_vec(),
            model: NetModel::Constant,
            alpha: 0.0,
            beta: first,
            exponent: 0.0,
            rsq: 1.0,
            classification: if first == 0.0 {
                Classification::Infinitesimal
            } else {
                Classification::Finite
            },
        });
    }
    let r: Vec<f64> = samples.iter().map(|s| s.resolution as f64).collect();
    let n = values.len();
    // highest adjusted fit wins; near-ties go to the model with fewer parameters
    let best = candidates(&r, &values)
        .into_iter()
        .fold(None::<Candidate>, |acc, c| match acc {
            None => Some(c),
            Some(a) => {
                let (fa, fc) = (adjusted(&a, n), adjusted(&c, n));
                let better = fc > fa + SELECTION_SLACK
                    || ((fc - fa).abs() <= SELECTION_SLACK && c.params < a.params);
                Some(if better { c } else { a })
            }
        })
        .expect("the constant model is always a candidate");
    Ok(NetFit {
        samples: samples.to_vec(),
        classification: classify(&values, best.model, best.rsq),
        model: best.model,
        alpha: best.alpha,
        beta: best.beta,
        exponent: best.exponent,
        rsq: best.rsq,
    })
}

/// Electrostatic energy at `q_n` approaching the boundary like `n^-exponent`.
pub fn near_boundary_study(setup: &NetSetup, exponent: f64, levels: &[u32]) -> Result<NetFit> {
    let samples = run_net(setup, &Quantity::ElectrostaticAtScaledQ(exponent), levels)?;
    fit_net(&samples)
}

/// Classification of a net over a doubled range given the shorter run. A
/// downgrade (infinite to finite, finite to infinitesimal) is reported as
/// undetermined.
pub fn reconcile(short: Classification, long: Classification) -> Classification {
    use Classification::*;
    match (short, long) {
        (Infinite, Finite) | (Finite, Infinitesimal) | (Infinite, Infinitesimal) => Undetermined,
        (_, c) => c,
    }
}

//! Membrane-plus-point-mass energy and its minimisation over the point.
//!
//! For a point `q` the level solution `u_q` of `Delta u = delta_q` gives
//! `F(q) = E(u_q, q) = 1/2 \int |grad u_q|^2 + u_q(q)`. With `k(q)` the basis
//! values and `K` the stiffness matrix, `F(q) = -1/2 k^T K^{-1} k <= 0`, and
//! `F(q) = 0` exactly on the boundary, where `k(q)` vanishes.

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{BasisFamily, LevelId, SpaceLevel};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Membership, Point};
use crate::solver::solve_point_source;

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub level: LevelId,
    #[serde(serialize_with = "ser_point")]
    pub q: Point,
    pub elastic: f64,
    pub point_value: f64,
    pub total: f64,
    pub electrostatic: f64,
}

pub(crate) fn ser_point<S: serde::Serializer>(
    p: &Point,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    p.coords().serialize(s)
}

fn ser_points<S: serde::Serializer>(ps: &[Point], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<&[f64]> = ps.iter().map(|p| p.coords()).collect();
    v.serialize(s)
}

pub fn energy_at(level: &SpaceLevel, q: &Point) -> Result<EnergyReport> {
    let sol = solve_point_source(level, q)?;
    let point_value = sol.point_value.unwrap_or(0.0);
    Ok(EnergyReport {
        level: level.id(),
        q: *q,
        elastic: sol.elastic,
        point_value,
        total: sol.elastic + point_value,
        electrostatic: sol.elastic,
    })
}

/// Exact gradient of `F` at an interior point: `-(grad k)^T K^{-1} k`.
pub fn reduced_gradient(level: &SpaceLevel, q: &Point) -> Result<Vec<f64>> {
    if level.family() != BasisFamily::SpectralSine {
        return Err(Error::Unsupported {
            op: "reduced_gradient",
            family: level.family().name(),
        });
    }
    if level.domain().contains(q)? != Membership::Interior {
        return Err(Error::InvalidArgument(
            "reduced gradient needs an interior point".into(),
        ));
    }
    let k = level.eval_basis(q)?;
    let grads = level.eval_gradients(q)?;
    let mu = level.stiffness().diag();
    let c: Vec<f64> = k.iter().zip(&mu).map(|(k, m)| k / m).collect();
    Ok(grads
        .iter()
        .map(|g| -g.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Grid points per axis, bounds included.
    pub grid: usize,
    /// Refinement stops once a step is shorter than this.
    pub tol: f64,
    /// Grid values within `tie_tol * |F_min|` of the best count as ties.
    pub tie_tol: f64,
    pub max_iter: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            grid: 33,
            tol: 1e-8,
            tie_tol: 1e-12,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizerResult {
    pub level: LevelId,
    #[serde(serialize_with = "ser_point")]
    pub q_min: Point,
    pub f_min: f64,
    pub grid: usize,
    pub iterations: usize,
    pub evaluations: usize,
    #[serde(serialize_with = "ser_points")]
    pub ties: Vec<Point>,
}

/// `F` on the uniform grid, in lexicographic point order.
pub fn grid_scan(level: &SpaceLevel, per_axis: usize) -> Result<Vec<(Point, f64)>> {
    if per_axis < 2 {
        return Err(Error::InvalidArgument(
            "grid needs at least 2 points per axis".into(),
        ));
    }
    level
        .domain()
        .grid(per_axis)
        .into_par_iter()
        .map(|p| energy_at(level, &p).map(|r| (p, r.total)))
        .collect()
}

/// Grid scan followed by local refinement: gradient descent with
/// backtracking for spectral levels, coordinate-wise golden section for P1.
pub fn minimize(level: &SpaceLevel, opts: &SearchOptions) -> Result<MinimizerResult> {
    if !(opts.tol > 0.0) || !(opts.tie_tol >= 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    let scan = grid_scan(level, opts.grid)?;
    let best = scan.iter().map(|(_, f)| *f).fold(f64::INFINITY, f64::min);
    let ties: Vec<Point> = scan
        .iter()
        .filter(|(_, f)| *f <= best + opts.tie_tol * best.abs())
        .map(|(p, _)| *p)
        .collect();
    // grid order is lexicographic, so the first tie is the smallest point
    let start = ties[0];
    let spacing = (0..level.domain().dim())
        .map(|a| level.domain().side(a) / (opts.grid - 1) as f64)
        .fold(f64::INFINITY, f64::min);
    let mut evals = scan.len();
    let mut q = start;
    let mut iterations = 0;
    if best != 0.0 {
        loop {
            let (refined, iters) = match level.family() {
                BasisFamily::SpectralSine => descend(level, q, spacing, opts, &mut evals)?,
                BasisFamily::FemP1 => coordinate_search(level, q, spacing, opts, &mut evals)?,
            };
            q = refined;
            iterations += iters;
            if iterations >= opts.max_iter {
                break;
            }
            // symmetric points are stationary without being minima; leave
            // them along the first compass direction that lowers F
            match escape(level, &q, spacing, opts.tol, &mut evals)? {
                Some(p) => q = p,
                None => break,
            }
        }
    }
    let f_min = energy_at(level, &q)?.total;
    Ok(MinimizerResult {
        level: level.id(),
        q_min: q,
        f_min,
        grid: opts.grid,
        iterations,
        evaluations: evals + 1,
        ties,
    })
}

fn total(level: &SpaceLevel, q: &Point, evals: &mut usize) -> Result<f64> {
    *evals += 1;
    Ok(energy_at(level, q)?.total)
}

const ESCAPE_MARGIN: f64 = 1e-13;

/// First probe, scanning step sizes `spacing / 2, spacing / 4, ...` down to
/// `tol` and compass directions in a fixed order, that strictly lowers `F`.
fn escape(
    level: &SpaceLevel,
    q: &Point,
    spacing: f64,
    tol: f64,
    evals: &mut usize,
) -> Result<Option<Point>> {
    // decreases below this are rounding in F, not descent
    let threshold = {
        let f = total(level, q, evals)?;
        f - ESCAPE_MARGIN * f.abs()
    };
    let directions: Vec<[f64; 2]> = if q.dim() == 1 {
        vec![[1.0, 0.0], [-1.0, 0.0]]
    } else {
        (0..8)
            .map(|i| {
                let a = i as f64 * std::f64::consts::FRAC_PI_4;
                [a.cos(), a.sin()]
            })
            .collect()
    };
    let mut step = spacing / 2.0;
    while step >= tol {
        for d in &directions {
            let mut p = *q;
            for axis in 0..q.dim() {
                p = p.with_coord(axis, q[axis] + step * d[axis]);
            }
            if matches!(level.domain().contains(&p), Ok(Membership::Interior))
                && total(level, &p, evals)? < threshold
            {
                return Ok(Some(p));
            }
        }
        step /= 2.0;
    }
    Ok(None)
}

fn inside(domain: &Domain, p: &Point) -> bool {
    matches!(domain.contains(p), Ok(m) if m != Membership::Exterior)
}

const GRADIENT_FLOOR: f64 = 1e-12;

fn descend(
    level: &SpaceLevel,
    start: Point,
    spacing: f64,
    opts: &SearchOptions,
    evals: &mut usize,
) -> Result<(Point, usize)> {
    const ARMIJO: f64 = 1e-4;
    let domain = level.domain();
    let mut q = start;
    let mut f = total(level, &q, evals)?;
    let mut trial = spacing;
    let mut iters = 0;
    while iters < opts.max_iter {
        iters += 1;
        let g = reduced_gradient(level, &q)?;
        let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        // a gradient at rounding level is a stationary point; stepping along
        // its direction only chases noise in F
        if gn <= GRADIENT_FLOOR * f.abs() / spacing {
            break;
        }
        let mut t = (2.0 * trial).min(spacing);
        let mut accepted = None;
        while t >= opts.tol {
            let mut cand = q;
            for (a, ga) in g.iter().enumerate() {
                cand = cand.with_coord(a, q[a] - t * ga / gn);
            }
            if inside(domain, &cand) {
                let fc = total(level, &cand, evals)?;
                if fc < f - ARMIJO * t * gn {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((cand, fc)) => {
                q = cand;
                f = fc;
                trial = t;
                if t < opts.tol {
                    break;
                }
            }
            None => break,
        }
    }
    Ok((q, iters))
}

fn golden_section(
    mut a: f64,
    mut b: f64,
    tol: f64,
    mut eval: impl FnMut(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while (b - a) > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

fn coordinate_search(
    level: &SpaceLevel,
    start: Point,
    spacing: f64,
    opts: &SearchOptions,
    evals: &mut usize,
) -> Result<(Point, usize)> {
    let domain = *level.domain();
    let mut q = start;
    let mut f = total(level, &q, evals)?;
    let mut half = spacing;
    let mut iters = 0;
    while iters < opts.max_iter {
        iters += 1;
        let mut moved: f64 = 0.0;
        for axis in 0..domain.dim() {
            let lo = (q[axis] - half).max(domain.lower()[axis]);
            let hi = (q[axis] + half).min(domain.upper()[axis]);
            let base = q;
            let (x, fx) = golden_section(lo, hi, opts.tol, |x| {
                total(level, &base.with_coord(axis, x), evals)
            })?;
            if fx < f {
                moved = moved.max((x - q[axis]).abs());
                q = q.with_coord(axis, x);
                f = fx;
            }
        }
        if moved < opts.tol {
            break;
        }
        half = (2.0 * moved).max(opts.tol);
    }
    Ok((q, iters))
}

//! Seeded invariant harness behind the `check` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::SpaceLevel;
use crate::energy::energy_at;
use crate::error::Result;
use crate::geometry::{Domain, Point};
use crate::ultra::{delta_at, project, Ultrafunction};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub trials: usize,
    pub failed: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

pub fn random_interior_point(rng: &mut impl Rng, d: &Domain) -> Point {
    let mut p = d.center();
    for a in 0..d.dim() {
        let t: f64 = rng.gen_range(0.001..0.999);
        p = p.with_coord(a, d.lower()[a] + t * d.side(a));
    }
    p
}

pub fn random_boundary_point(rng: &mut impl Rng, d: &Domain) -> Point {
    let mut p = random_interior_point(rng, d);
    let axis = rng.gen_range(0..d.dim());
    let face = if rng.gen_bool(0.5) {
        d.lower()[axis]
    } else {
        d.upper()[axis]
    };
    p = p.with_coord(axis, face);
    p
}

pub fn random_element<'a>(rng: &mut impl Rng, level: &'a SpaceLevel) -> Ultrafunction<'a> {
    let c = (0..level.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Ultrafunction::new(level, c).expect("finite coefficients")
}

/// Smooth function outside the span: affine part plus a random plane wave.
pub fn random_smooth(rng: &mut impl Rng) -> impl Fn(&Point) -> f64 + Send + Sync {
    let a: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
    move |p: &Point| {
        let x = p[0];
        let y = if p.dim() > 1 { p[1] } else { 0.0 };
        a[0] + a[1] * x + a[2] * y + a[3] * x * y + (a[4] * x + a[5] * y + 0.3).cos()
    }
}

fn outcome(name: &'static str, tolerance: f64, errors: &[(f64, f64)]) -> CheckOutcome {
    CheckOutcome {
        name,
        trials: errors.len(),
        failed: errors.iter().filter(|(e, bound)| !(e <= bound)).count(),
        max_error: errors.iter().map(|(e, _)| *e).fold(0.0, f64::max),
        tolerance,
    }
}

/// Reproducing identity, projection contract, boundary exclusion and the
/// weak-form energy identity on `trials` seeded random samples.
pub fn run_checks(level: &SpaceLevel, trials: usize, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = *level.domain();
    let mut out = Vec::new();

    let mut errs = Vec::with_capacity(trials);
    for _ in 0..trials {
        let q = random_interior_point(&mut rng, &d);
        let v = random_element(&mut rng, level);
        let delta = delta_at(level, &q)?;
        let e = (delta.inner(&v)? - v.evaluate(&q)?).abs();
        errs.push((e, 1e-10 * (1.0 + v.norm())));
    }
    out.push(outcome("reproducing-property", 1e-10, &errs));

    let projection_trials = trials.min(20);
    let mut idem = Vec::new();
    let mut orth = Vec::new();
    for _ in 0..projection_trials {
        let f = random_smooth(&mut rng);
        let fp = project(level, &f)?;
        let again = project(level, |p| fp.evaluate(p).unwrap_or(0.0))?;
        let e = fp
            .coeffs()
            .iter()
            .zip(again.coeffs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        idem.push((e, 1e-12));
        let v = random_element(&mut rng, level);
        let gap = level
            .integrate(|p| (f(p) - fp.evaluate(p).unwrap_or(0.0)) * v.evaluate(p).unwrap_or(0.0));
        orth.push((gap.abs(), 1e-10));
    }
    out.push(outcome("projection-idempotence", 1e-12, &idem));
    out.push(outcome("projection-orthogonality", 1e-10, &orth));

    let mut bnd = Vec::new();
    for _ in 0..trials.min(20) {
        let q = random_boundary_point(&mut rng, &d);
        let delta = delta_at(level, &q)?;
        let r = energy_at(level, &q)?;
        let e = delta
            .coeffs()
            .iter()
            .map(|c| c.abs())
            .fold(r.total.abs() + r.elastic, f64::max);
        bnd.push((e, 0.0));
    }
    out.push(outcome("boundary-exclusion", 0.0, &bnd));

    let mut weak = Vec::new();
    for _ in 0..trials.min(50) {
        let q = random_interior_point(&mut rng, &d);
        let r = energy_at(level, &q)?;
        let rel = (r.total + r.elastic).abs() / r.elastic.abs().max(f64::MIN_POSITIVE);
        weak.push((rel, 1e-9));
    }
    out.push(outcome("weak-form-identity", 1e-9, &weak));
    Ok(out)
}

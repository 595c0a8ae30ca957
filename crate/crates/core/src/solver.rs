//! Level Dirichlet problems.
//!
//! Two sign conventions are used, each matching its problem statement:
//! `solve_poisson` solves `-Delta u = f` while `solve_point_source` solves
//! `Delta u = delta_q`. Both reduce to one solve with the stiffness matrix.

use crate::basis::{Factorization, SpaceLevel};
use crate::error::{Error, Result};
use crate::geometry::{Membership, Point};
use crate::linalg::{dot, relative_residual};
use crate::ultra::Ultrafunction;

/// Largest accepted relative residual `||K c - b|| / ||b||`.
pub const SOLVE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct DirichletSolution<'a> {
    pub u: Ultrafunction<'a>,
    pub q: Option<Point>,
    /// `1/2 c^T K c`.
    pub elastic: f64,
    /// `u(q)` for point-source problems.
    pub point_value: Option<f64>,
    pub residual: f64,
}

fn solve_stiffness(level: &SpaceLevel, rhs: &[f64]) -> Result<(Vec<f64>, f64)> {
    if rhs.iter().all(|&v| v == 0.0) {
        return Ok((vec![0.0; level.n()], 0.0));
    }
    let k = level.stiffness();
    let c = if k.is_diagonal() && level.factorization() == Factorization::Banded {
        rhs.iter().zip(k.diag()).map(|(b, d)| b / d).collect()
    } else {
        level.stiffness_factor()?.solve(rhs)
    };
    let residual = relative_residual(k, &c, rhs);
    if !(residual <= SOLVE_TOLERANCE) {
        return Err(Error::Residual {
            residual,
            tolerance: SOLVE_TOLERANCE,
        });
    }
    Ok((c, residual))
}

/// `-Delta_lambda u = Phi f`: stiffness `c = b` with `b_i = \int f phi_i`.
pub fn solve_poisson<'a, F: Fn(&Point) -> f64>(
    level: &'a SpaceLevel,
    f: F,
) -> Result<DirichletSolution<'a>> {
    let b = level.load_vector(f)?;
    let (c, residual) = solve_stiffness(level, &b)?;
    let u = Ultrafunction::new(level, c)?;
    Ok(DirichletSolution {
        elastic: u.elastic_energy(),
        u,
        q: None,
        point_value: None,
        residual,
    })
}

/// `Delta_lambda u = delta_q`: stiffness `c = -k(q)`, where `k(q)` holds the
/// basis values at `q`. Identically zero when `q` is on the boundary.
pub fn solve_point_source<'a>(level: &'a SpaceLevel, q: &Point) -> Result<DirichletSolution<'a>> {
    let k = level.eval_basis(q)?;
    let rhs: Vec<f64> = k.iter().map(|v| -v).collect();
    let (c, residual) = solve_stiffness(level, &rhs)?;
    let point_value = dot(&c, &k);
    let u = Ultrafunction::new(level, c)?;
    Ok(DirichletSolution {
        elastic: u.elastic_energy(),
        u,
        q: Some(*q),
        point_value: Some(point_value),
        residual,
    })
}

/// Largest `||u_{q'} - u_q||_{L2}` over probe points at distance `radius`
/// from `q` (both axis directions in 1D, eight compass directions in 2D).
pub fn continuity_probe(level: &SpaceLevel, q: &Point, radius: f64) -> Result<f64> {
    let domain = level.domain();
    if domain.contains(q)? != Membership::Interior {
        return Err(Error::InvalidArgument(
            "continuity probe needs an interior point".into(),
        ));
    }
    if !(radius >= 0.0) {
        return Err(Error::InvalidArgument("radius must be nonnegative".into()));
    }
    let dist = domain.boundary_distance(q)?;
    if radius >= dist {
        return Err(Error::InvalidArgument(format!(
            "radius {radius} too large: boundary is {dist} away"
        )));
    }
    let base = solve_point_source(level, q)?.u;
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
    let mut worst: f64 = 0.0;
    for d in directions {
        let mut p = *q;
        for axis in 0..q.dim() {
            p = p.with_coord(axis, q[axis] + radius * d[axis]);
        }
        let u = solve_point_source(level, &p)?.u;
        worst = worst.max(u.sub(&base)?.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisFamily;
    use crate::geometry::Domain;
    use std::f64::consts::{PI, SQRT_2};

    fn spectral_1d(level: u32) -> SpaceLevel {
        SpaceLevel::build(&Domain::unit_interval(), BasisFamily::SpectralSine, level).unwrap()
    }

    #[test]
    fn eigenmode_right_hand_side() {
        let s = spectral_1d(5);
        let e1 = Ultrafunction::basis_function(&s, 0).unwrap();
        let mu = PI * PI;
        let sol = solve_poisson(&s, |p| mu * e1.evaluate(p).unwrap()).unwrap();
        assert!((sol.u.coeffs()[0] - 1.0).abs() < 1e-12);
        for c in &sol.u.coeffs()[1..] {
            assert!(c.abs() < 1e-12);
        }
    }

    #[test]
    fn zero_right_hand_side() {
        let s = SpaceLevel::build(&Domain::unit_square(), BasisFamily::FemP1, 3).unwrap();
        let sol = solve_poisson(&s, |_| 0.0).unwrap();
        assert!(sol.u.is_zero());
        assert_eq!(sol.elastic, 0.0);
    }

    #[test]
    fn constant_load_matches_parabola() {
        let s = spectral_1d(127);
        let sol = solve_poisson(&s, |_| 1.0).unwrap();
        let mid = sol.u.evaluate(&Point::x(0.5)).unwrap();
        assert!((mid - 0.125).abs() < 1e-6, "{mid}");
        assert_eq!(sol.u.evaluate(&Point::x(1.0)).unwrap(), 0.0);
        assert_eq!(sol.u.evaluate(&Point::x(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn single_mode_point_source() {
        let s = spectral_1d(1);
        let sol = solve_point_source(&s, &Point::x(0.5)).unwrap();
        assert!((sol.u.coeffs()[0] + SQRT_2 / (PI * PI)).abs() < 1e-15);
        let v = sol.u.evaluate(&Point::x(0.5)).unwrap();
        assert!((v + 2.0 / (PI * PI)).abs() < 1e-15);
        assert!((sol.point_value.unwrap() - v).abs() < 1e-15);
    }

    #[test]
    fn boundary_source_gives_zero() {
        for fam in [BasisFamily::SpectralSine, BasisFamily::FemP1] {
            let s = SpaceLevel::build(&Domain::unit_square(), fam, 3).unwrap();
            let sol = solve_point_source(&s, &Point::xy(0.0, 0.4)).unwrap();
            assert!(sol.u.is_zero());
            assert_eq!(sol.elastic, 0.0);
            assert_eq!(sol.point_value, Some(0.0));
        }
    }

    #[test]
    fn weak_form_identity_fem() {
        let s = SpaceLevel::build(&Domain::unit_square(), BasisFamily::FemP1, 4).unwrap();
        let sol = solve_point_source(&s, &Point::xy(0.31, 0.62)).unwrap();
        let pv = sol.point_value.unwrap();
        assert!((pv + 2.0 * sol.elastic).abs() <= 1e-9 * pv.abs());
        assert!(sol.residual <= SOLVE_TOLERANCE);
    }

    #[test]
    fn continuity_probe_shrinks() {
        let s = spectral_1d(16);
        let q = Point::x(0.5);
        assert_eq!(continuity_probe(&s, &q, 0.0).unwrap(), 0.0);
        let a = continuity_probe(&s, &q, 1e-2).unwrap();
        let b = continuity_probe(&s, &q, 1e-3).unwrap();
        let c = continuity_probe(&s, &q, 1e-4).unwrap();
        assert!(a > b && b > c && c > 0.0);
        assert!(continuity_probe(&s, &q, 0.6).is_err());
        assert!(continuity_probe(&s, &Point::x(0.0), 0.1).is_err());
    }
}

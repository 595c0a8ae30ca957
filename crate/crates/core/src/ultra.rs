//! Elements of a level: coefficient vectors over its basis.
//!
//! The projection onto a level and the point-evaluation representer
//! (`delta_at`) are both defined through the Gram system, so they work for
//! non-orthonormal families. When the Gram matrix is the identity they reduce
//! to `c_i = \int f e_i` and `delta_q = sum_i e_i(q) e_i`.

use crate::basis::{Factorization, SpaceLevel};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::linalg::dot;

#[derive(Debug, Clone)]
pub struct Ultrafunction<'a> {
    level: &'a SpaceLevel,
    coeffs: Vec<f64>,
}

impl<'a> Ultrafunction<'a> {
    pub fn new(level: &'a SpaceLevel, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != level.n() {
            return Err(Error::DimensionMismatch {
                expected: level.n(),
                got: coeffs.len(),
            });
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("coefficient {c}")));
        }
        Ok(Ultrafunction { level, coeffs })
    }

    pub fn zero(level: &'a SpaceLevel) -> Self {
        Ultrafunction {
            level,
            coeffs: vec![0.0; level.n()],
        }
    }

    /// The `i`-th basis function.
    pub fn basis_function(level: &'a SpaceLevel, i: usize) -> Result<Self> {
        if i >= level.n() {
            return Err(Error::InvalidArgument(format!(
                "basis index {i} out of range for dimension {}",
                level.n()
            )));
        }
        let mut coeffs = vec![0.0; level.n()];
        coeffs[i] = 1.0;
        Ok(Ultrafunction { level, coeffs })
    }

    pub fn level(&self) -> &'a SpaceLevel {
        self.level
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn evaluate(&self, p: &Point) -> Result<f64> {
        Ok(self
            .level
            .eval_basis_sparse(p)?
            .into_iter()
            .map(|(i, v)| self.coeffs[i] * v)
            .sum())
    }

    /// L2 inner product `c_u^T G c_v`.
    pub fn inner(&self, other: &Ultrafunction<'_>) -> Result<f64> {
        if !std::ptr::eq(self.level, other.level) {
            return Err(Error::LevelMismatch);
        }
        Ok(self.level.gram().bilinear(&self.coeffs, &other.coeffs))
    }

    pub fn norm(&self) -> f64 {
        self.level
            .gram()
            .bilinear(&self.coeffs, &self.coeffs)
            .sqrt()
    }

    /// `1/2 \int |grad u|^2`.
    pub fn elastic_energy(&self) -> f64 {
        0.5 * self.level.stiffness().bilinear(&self.coeffs, &self.coeffs)
    }

    pub fn sub(&self, other: &Ultrafunction<'_>) -> Result<Ultrafunction<'a>> {
        if !std::ptr::eq(self.level, other.level) {
            return Err(Error::LevelMismatch);
        }
        Ok(Ultrafunction {
            level: self.level,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

/// Orthogonal L2 projection of `f` onto the level.
pub fn project<'a, F: Fn(&Point) -> f64>(level: &'a SpaceLevel, f: F) -> Result<Ultrafunction<'a>> {
    let b = level.load_vector(f)?;
    let coeffs = if level.is_orthonormal() && level.factorization() == Factorization::Banded {
        b
    } else {
        level.gram_factor()?.solve(&b)
    };
    Ultrafunction::new(level, coeffs)
}

/// Representer of point evaluation at `q`: the unique `d` in the level with
/// `(d, v) = v(q)` for every `v`. Zero exactly when `q` is on the boundary.
pub fn delta_at<'a>(level: &'a SpaceLevel, q: &Point) -> Result<Ultrafunction<'a>> {
    let k = level.eval_basis(q)?;
    if k.iter().all(|&v| v == 0.0) {
        return Ok(Ultrafunction::zero(level));
    }
    let coeffs = if level.is_orthonormal() && level.factorization() == Factorization::Banded {
        k
    } else {
        level.gram_factor()?.solve(&k)
    };
    Ultrafunction::new(level, coeffs)
}

/// `(delta_q, delta_q)`, which equals `delta_q(q)`.
pub fn delta_self_energy(level: &SpaceLevel, q: &Point) -> Result<f64> {
    let d = delta_at(level, q)?;
    let k = level.eval_basis(q)?;
    Ok(dot(d.coeffs(), &k))
}

//! Finite-dimensional Dirichlet spaces organised as a nested chain of levels.
//!
//! A [`SpaceLevel`] is one member of the chain: a basis of functions that
//! vanish on the boundary, its Gram matrix `(phi_i, phi_j)`, its stiffness
//! matrix `(grad phi_i, grad phi_j)` and a quadrature rule that integrates
//! products of basis functions exactly up to rounding.
//!
//! Two families are provided:
//!
//! * `spectral-sine`: tensor products of `sqrt(2/L) sin(k pi (x - a) / L)`,
//!   all modes with max index `<= level`. Orthonormal, diagonal stiffness.
//! * `fem-p1`: continuous piecewise-linear hats on a uniform mesh with
//!   `2^level` cells per axis (cells split along the rising diagonal in 2D).
//!
//! Spectral modes are ordered by total index, then by the per-axis indices;
//! P1 nodes are ordered lexicographically by coordinates (x first).

mod fem;
mod spectral;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Membership, Point};
use crate::linalg::{BandCholesky, SymBandMatrix};

use fem::FemP1;
use spectral::SpectralSine;

/// Default cap on the dimension of a level.
pub const DEFAULT_MAX_N: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisFamily {
    SpectralSine,
    FemP1,
}

impl BasisFamily {
    pub fn name(&self) -> &'static str {
        match self {
            BasisFamily::SpectralSine => "spectral-sine",
            BasisFamily::FemP1 => "fem-p1",
        }
    }

    /// Modes per axis (spectral) or interior nodes per axis (P1) at `level`.
    pub fn per_axis(&self, level: u32) -> Result<usize> {
        if level == 0 {
            return Err(Error::InvalidArgument("level must be at least 1".into()));
        }
        match self {
            BasisFamily::SpectralSine => Ok(level as usize),
            BasisFamily::FemP1 => {
                if level > 24 {
                    return Err(Error::InvalidArgument(format!(
                        "fem-p1 level {level} is beyond the supported range"
                    )));
                }
                Ok((1usize << level) - 1)
            }
        }
    }
}

impl fmt::Display for BasisFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral-sine" | "spectral" => Ok(BasisFamily::SpectralSine),
            "fem-p1" | "fem" => Ok(BasisFamily::FemP1),
            other => Err(Error::InvalidArgument(format!(
                "unknown basis family `{other}` (expected spectral-sine or fem-p1)"
            ))),
        }
    }
}

/// How the Gram and stiffness systems are factorized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Factorization {
    /// Cholesky restricted to the matrix band (diagonal solves for spectral).
    #[default]
    Banded,
    /// Cholesky of the full matrix.
    Dense,
}

/// Build-time knobs for a level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelOptions {
    pub max_n: usize,
    pub factorization: Factorization,
    /// Overrides the quadrature point count per axis (spectral) or per
    /// element axis (P1).
    pub quadrature: Option<usize>,
}

impl Default for LevelOptions {
    fn default() -> Self {
        LevelOptions {
            max_n: DEFAULT_MAX_N,
            factorization: Factorization::Banded,
            quadrature: None,
        }
    }
}

/// Identifies a level in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelId {
    pub family: BasisFamily,
    pub level: u32,
    pub n: usize,
}

pub(crate) enum Repr {
    Spectral(SpectralSine),
    Fem(FemP1),
}

pub struct SpaceLevel {
    domain: Domain,
    family: BasisFamily,
    level: u32,
    n: usize,
    repr: Repr,
    factorization: Factorization,
    gram: SymBandMatrix,
    stiffness: SymBandMatrix,
    gram_chol: OnceLock<Result<BandCholesky>>,
    stiffness_chol: OnceLock<Result<BandCholesky>>,
}

impl fmt::Debug for SpaceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceLevel")
            .field("domain", &self.domain)
            .field("family", &self.family)
            .field("level", &self.level)
            .field("n", &self.n)
            .finish()
    }
}

impl SpaceLevel {
    pub fn build(domain: &Domain, family: BasisFamily, level: u32) -> Result<Self> {
        Self::build_with(domain, family, level, LevelOptions::default())
    }

    pub fn build_with(
        domain: &Domain,
        family: BasisFamily,
        level: u32,
        opts: LevelOptions,
    ) -> Result<Self> {
        let per_axis = family.per_axis(level)?;
        let n = per_axis
            .checked_pow(domain.dim() as u32)
            .ok_or(Error::ResourceLimit {
                n: usize::MAX,
                cap: opts.max_n,
            })?;
        if n > opts.max_n {
            return Err(Error::ResourceLimit { n, cap: opts.max_n });
        }
        if let Some(q) = opts.quadrature {
            if q == 0 {
                return Err(Error::InvalidArgument(
                    "quadrature override must be positive".into(),
                ));
            }
        }
        let (repr, gram, stiffness) = match family {
            BasisFamily::SpectralSine => {
                let s = SpectralSine::new(domain, per_axis, opts.quadrature);
                let gram = SymBandMatrix::identity(n);
                let stiffness = SymBandMatrix::diagonal(s.eigenvalues());
                (Repr::Spectral(s), gram, stiffness)
            }
            BasisFamily::FemP1 => {
                let f = FemP1::new(domain, per_axis + 1, opts.quadrature);
                let (gram, stiffness) = f.assemble();
                (Repr::Fem(f), gram, stiffness)
            }
        };
        debug_assert_eq!(gram.dim(), n);
        Ok(SpaceLevel {
            domain: *domain,
            family,
            level,
            n,
            repr,
            factorization: opts.factorization,
            gram,
            stiffness,
            gram_chol: OnceLock::new(),
            stiffness_chol: OnceLock::new(),
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn id(&self) -> LevelId {
        LevelId {
            family: self.family,
            level: self.level,
            n: self.n,
        }
    }

    /// Basis functions per axis; `n = per_axis^dim`.
    pub fn per_axis(&self) -> usize {
        match &self.repr {
            Repr::Spectral(s) => s.modes_per_axis(),
            Repr::Fem(f) => f.nodes_per_axis(),
        }
    }

    pub fn gram(&self) -> &SymBandMatrix {
        &self.gram
    }

    pub fn stiffness(&self) -> &SymBandMatrix {
        &self.stiffness
    }

    pub fn factorization(&self) -> Factorization {
        self.factorization
    }

    fn factor(&self, m: &SymBandMatrix) -> Result<BandCholesky> {
        match self.factorization {
            Factorization::Banded => m.cholesky(),
            Factorization::Dense => m.widened(self.n.saturating_sub(1)).cholesky(),
        }
    }

    /// Cached Cholesky factor of the Gram matrix.
    pub fn gram_factor(&self) -> Result<&BandCholesky> {
        self.gram_chol
            .get_or_init(|| self.factor(&self.gram))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Cached Cholesky factor of the stiffness matrix.
    pub fn stiffness_factor(&self) -> Result<&BandCholesky> {
        self.stiffness_chol
            .get_or_init(|| self.factor(&self.stiffness))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn is_orthonormal(&self) -> bool {
        matches!(self.repr, Repr::Spectral(_))
    }

    /// `(phi_1(p), ..., phi_n(p))`, identically zero on the boundary.
    pub fn eval_basis(&self, p: &Point) -> Result<Vec<f64>> {
        if self.domain.require_closure(p)? == Membership::Boundary {
            return Ok(vec![0.0; self.n]);
        }
        Ok(match &self.repr {
            Repr::Spectral(s) => s.eval(p),
            Repr::Fem(f) => {
                let mut out = vec![0.0; self.n];
                for (i, v) in f.local_values(p) {
                    out[i] += v;
                }
                out
            }
        })
    }

    /// Nonzero basis values at `p` as `(index, value)` pairs.
    pub fn eval_basis_sparse(&self, p: &Point) -> Result<Vec<(usize, f64)>> {
        if self.domain.require_closure(p)? == Membership::Boundary {
            return Ok(Vec::new());
        }
        Ok(match &self.repr {
            Repr::Spectral(s) => s.eval(p).into_iter().enumerate().collect(),
            Repr::Fem(f) => f.local_values(p),
        })
    }

    /// Partial derivatives of every basis function at `p`, one vector per
    /// axis. Only the spectral family has pointwise gradients.
    pub fn eval_gradients(&self, p: &Point) -> Result<Vec<Vec<f64>>> {
        self.domain.require_closure(p)?;
        match &self.repr {
            Repr::Spectral(s) => Ok(s.eval_gradients(p)),
            Repr::Fem(_) => Err(Error::Unsupported {
                op: "eval_gradients",
                family: "fem-p1",
            }),
        }
    }

    /// `Delta phi_i(p)` for every basis function (spectral family only).
    pub fn eval_laplacian(&self, p: &Point) -> Result<Vec<f64>> {
        self.domain.require_closure(p)?;
        match &self.repr {
            Repr::Spectral(s) => Ok(s.eval_laplacian(p)),
            Repr::Fem(_) => Err(Error::Unsupported {
                op: "eval_laplacian",
                family: "fem-p1",
            }),
        }
    }

    /// Quadrature approximation of `\int g` over the domain.
    pub fn integrate<G: Fn(&Point) -> f64>(&self, g: G) -> f64 {
        match &self.repr {
            Repr::Spectral(s) => s.integrate(&g),
            Repr::Fem(f) => f.integrate(&g),
        }
    }

    /// Load vector `b_i = \int f phi_i`.
    pub fn load_vector<F: Fn(&Point) -> f64>(&self, f: F) -> Result<Vec<f64>> {
        let b = match &self.repr {
            Repr::Spectral(s) => s.load_vector(&f),
            Repr::Fem(fem) => fem.load_vector(&f),
        };
        if let Some(v) = b.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("load vector entry {v}")));
        }
        Ok(b)
    }

    /// Number of quadrature nodes used by [`SpaceLevel::integrate`].
    pub fn quadrature_size(&self) -> usize {
        match &self.repr {
            Repr::Spectral(s) => s.quadrature_size(),
            Repr::Fem(f) => f.quadrature_size(),
        }
    }

    /// Mode indices of the spectral family (`[k, 0]` in 1D).
    pub fn spectral_modes(&self) -> Option<&[[usize; 2]]> {
        match &self.repr {
            Repr::Spectral(s) => Some(s.modes()),
            Repr::Fem(_) => None,
        }
    }

    /// Interior node coordinates of the P1 family, in basis order.
    pub fn fem_nodes(&self) -> Option<Vec<Point>> {
        match &self.repr {
            Repr::Spectral(_) => None,
            Repr::Fem(f) => Some(f.nodes()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn spectral_level_one() {
        let s = SpaceLevel::build(&Domain::unit_interval(), BasisFamily::SpectralSine, 1).unwrap();
        assert_eq!(s.n(), 1);
        assert!((s.stiffness().get(0, 0) - PI * PI).abs() < 1e-14);
        let v = s.eval_basis(&Point::x(0.5)).unwrap();
        assert!((v[0] - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn spectral_eval_at_midpoint() {
        let s = SpaceLevel::build(&Domain::unit_interval(), BasisFamily::SpectralSine, 2).unwrap();
        let v = s.eval_basis(&Point::x(0.5)).unwrap();
        assert!((v[0] - SQRT_2).abs() < 1e-15);
        assert!(v[1].abs() < 1e-15);
    }

    #[test]
    fn dimensions_follow_the_chain() {
        let sq = Domain::unit_square();
        let f = SpaceLevel::build(&sq, BasisFamily::FemP1, 2).unwrap();
        assert_eq!(f.n(), 9);
        assert_eq!(f.per_axis(), 3);
        let s = SpaceLevel::build(&sq, BasisFamily::SpectralSine, 5).unwrap();
        assert_eq!(s.n(), 25);
        let f1 = SpaceLevel::build(&Domain::unit_interval(), BasisFamily::FemP1, 3).unwrap();
        assert_eq!(f1.n(), 7);
    }

    #[test]
    fn spectral_mode_order() {
        let s = SpaceLevel::build(&Domain::unit_square(), BasisFamily::SpectralSine, 2).unwrap();
        assert_eq!(
            s.spectral_modes().unwrap(),
            &[[1, 1], [1, 2], [2, 1], [2, 2]]
        );
    }

    #[test]
    fn fem_node_order_is_lexicographic() {
        let f = SpaceLevel::build(&Domain::unit_square(), BasisFamily::FemP1, 2).unwrap();
        let nodes = f.fem_nodes().unwrap();
        assert_eq!(nodes[0], Point::xy(0.25, 0.25));
        assert_eq!(nodes[1], Point::xy(0.25, 0.5));
        assert_eq!(nodes[3], Point::xy(0.5, 0.25));
    }

    #[test]
    fn resource_cap() {
        let opts = LevelOptions {
            max_n: 100,
            ..LevelOptions::default()
        };
        let err =
            SpaceLevel::build_with(&Domain::unit_square(), BasisFamily::SpectralSine, 11, opts)
                .unwrap_err();
        assert_eq!(err, Error::ResourceLimit { n: 121, cap: 100 });
        assert!(SpaceLevel::build(&Domain::unit_interval(), BasisFamily::SpectralSine, 0).is_err());
    }

    #[test]
    fn exterior_points_rejected() {
        let s = SpaceLevel::build(&Domain::unit_interval(), BasisFamily::FemP1, 2).unwrap();
        assert!(matches!(
            s.eval_basis(&Point::x(1.01)),
            Err(Error::ExteriorPoint(_))
        ));
    }

    #[test]
    fn family_parsing() {
        assert_eq!("fem-p1".parse::<BasisFamily>().unwrap(), BasisFamily::FemP1);
        assert!("spline".parse::<BasisFamily>().is_err());
    }
}

//! Nested finite-dimensional Dirichlet spaces, point sources and the
//! membrane-plus-point-mass energy.
//!
//! The crate builds a chain of Galerkin levels ([`basis`]), represents
//! elements of a level ([`ultra`]), solves level Dirichlet problems
//! ([`solver`]), evaluates and minimises the energy over the position of the
//! point mass ([`energy`]) and studies how quantities behave along the chain
//! ([`netlab`]).
//!
//! ```
//! use ultrafn::{energy_at, BasisFamily, Domain, Point, SpaceLevel};
//!
//! let level = SpaceLevel::build(&Domain::unit_interval(), BasisFamily::SpectralSine, 1)?;
//! let report = energy_at(&level, &Point::x(0.5))?;
//! assert!((report.total + 1.0 / std::f64::consts::PI.powi(2)).abs() < 1e-15);
//! # Ok::<(), ultrafn::Error>(())
//! ```

// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod cli;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod netlab;
pub mod quadrature;
pub mod solver;
pub mod ultra;

pub use basis::{BasisFamily, Factorization, LevelId, LevelOptions, SpaceLevel};
pub use energy::{
    energy_at, minimize, reduced_gradient, EnergyReport, MinimizerResult, SearchOptions,
};
pub use error::{Error, Result};
pub use geometry::{Domain, Membership, Point};
pub use netlab::{
    fit_net, near_boundary_study, run_net, Classification, NetFit, NetModel, NetSample, NetSetup,
    Quantity,
};
pub use solver::{continuity_probe, solve_point_source, solve_poisson, DirichletSolution};
pub use ultra::{delta_at, project, Ultrafunction};

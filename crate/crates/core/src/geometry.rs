//! Axis-aligned rectangular domains in one or two dimensions.
//!
//! Membership is decided exactly on the floating-point coordinates, so a
//! point is on the boundary only when one of its coordinates equals a bound.

use crate::error::{Error, Result};

/// Maximum supported spatial dimension.
pub const MAX_DIM: usize = 2;

/// A point in the plane or on the line. Unused trailing coordinates are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; MAX_DIM],
    dim: usize,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "points have 1 or 2 coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("point coordinate {c}")));
        }
        let mut buf = [0.0; MAX_DIM];
        buf[..coords.len()].copy_from_slice(coords);
        Ok(Point {
            coords: buf,
            dim: coords.len(),
        })
    }

    pub fn x(x: f64) -> Self {
        Point {
            coords: [x, 0.0],
            dim: 1,
        }
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Point {
            coords: [x, y],
            dim: 2,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn with_coord(mut self, axis: usize, value: f64) -> Self {
        self.coords[axis] = value;
        self
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, axis: usize) -> &f64 {
        &self.coords()[axis]
    }
}

/// Where a point sits relative to a domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Membership {
    Interior,
    Boundary,
    Exterior,
}

/// Open rectangle `(lower[0], upper[0]) x ... ` together with its closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    dim: usize,
    lower: [f64; MAX_DIM],
    upper: [f64; MAX_DIM],
}

impl Domain {
    pub fn new(lower: &[f64], upper: &[f64]) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::InvalidDomain(format!(
                "lower has {} coordinates but upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        let dim = lower.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidDomain(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        let mut lo = [0.0; MAX_DIM];
        let mut hi = [0.0; MAX_DIM];
        for axis in 0..dim {
            let (a, b) = (lower[axis], upper[axis]);
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidDomain(format!(
                    "axis {axis}: bounds must be finite"
                )));
            }
            if a >= b {
                return Err(Error::InvalidDomain(format!(
                    "axis {axis}: lower bound {a} must be below upper bound {b}"
                )));
            }
            lo[axis] = a;
            hi[axis] = b;
        }
        Ok(Domain {
            dim,
            lower: lo,
            upper: hi,
        })
    }

    pub fn unit_interval() -> Self {
        Domain::new(&[0.0], &[1.0]).unwrap()
    }

    pub fn unit_square() -> Self {
        Domain::new(&[0.0, 0.0], &[1.0, 1.0]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower[..self.dim]
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper[..self.dim]
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn measure(&self) -> f64 {
        (0..self.dim).map(|a| self.side(a)).product()
    }

    pub fn center(&self) -> Point {
        let mut p = Point::new(self.lower()).unwrap();
        for axis in 0..self.dim {
            p = p.with_coord(axis, 0.5 * (self.lower[axis] + self.upper[axis]));
        }
        p
    }

    fn check_dim(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: p.dim(),
            });
        }
        Ok(())
    }

    pub fn contains(&self, p: &Point) -> Result<Membership> {
        self.check_dim(p)?;
        let mut on_face = false;
        for axis in 0..self.dim {
            let c = p[axis];
            if c < self.lower[axis] || c > self.upper[axis] {
                return Ok(Membership::Exterior);
            }
            if c == self.lower[axis] || c == self.upper[axis] {
                on_face = true;
            }
        }
        Ok(if on_face {
            Membership::Boundary
        } else {
            Membership::Interior
        })
    }

    /// Errors unless `p` lies in the closure; returns its membership otherwise.
    pub fn require_closure(&self, p: &Point) -> Result<Membership> {
        match self.contains(p)? {
            Membership::Exterior => Err(Error::ExteriorPoint(p.coords().to_vec())),
            m => Ok(m),
        }
    }

    pub fn boundary_distance(&self, p: &Point) -> Result<f64> {
        self.require_closure(p)?;
        Ok((0..self.dim)
            .map(|a| (p[a] - self.lower[a]).min(self.upper[a] - p[a]))
            .fold(f64::INFINITY, f64::min))
    }

    /// Uniform grid over the closure with `per_axis` points per axis,
    /// ordered lexicographically by coordinates.
    pub fn grid(&self, per_axis: usize) -> Vec<Point> {
        let axis_nodes: Vec<Vec<f64>> = (0..self.dim)
            .map(|a| {
                (0..per_axis)
                    .map(|i| {
                        if i + 1 == per_axis {
                            self.upper[a]
                        } else {
                            self.lower[a] + self.side(a) * i as f64 / (per_axis - 1) as f64
                        }
                    })
                    .collect()
            })
            .collect();
        match self.dim {
            1 => axis_nodes[0].iter().map(|&x| Point::x(x)).collect(),
            _ => axis_nodes[0]
                .iter()
                .flat_map(|&x| axis_nodes[1].iter().map(move |&y| Point::xy(x, y)))
                .collect(),
        }
    }
}

use crate::geometry::{Domain, Point};
use crate::linalg::SymBandMatrix;
use crate::quadrature::{collapsed_triangle, GaussRule};

const DEFAULT_ELEMENT_POINTS: usize = 4;

/// Uniform P1 mesh. In 2D every cell `[x_i, x_i+1] x [y_j, y_j+1]` is split
/// into a lower triangle `t <= s` and an upper triangle `t > s`, where
/// `(s, t)` are the local cell coordinates in `[0, 1]^2`.
pub(crate) struct FemP1 {
    dim: usize,
    cells: usize,
    lower: [f64; 2],
    side: [f64; 2],
    h: [f64; 2],
    element_points: usize,
}

/// Vertex offsets and barycentric gradients (in local units) of the two
/// triangles of a cell.
const LOWER_TRI: [[usize; 2]; 3] = [[0, 0], [1, 0], [1, 1]];
const UPPER_TRI: [[usize; 2]; 3] = [[0, 0], [1, 1], [0, 1]];
const LOWER_GRAD: [[f64; 2]; 3] = [[-1.0, 0.0], [1.0, -1.0], [0.0, 1.0]];
const UPPER_GRAD: [[f64; 2]; 3] = [[0.0, -1.0], [1.0, 0.0], [-1.0, 1.0]];

fn lower_bary(s: f64, t: f64) -> [f64; 3] {
    [1.0 - s, s - t, t]
}

fn upper_bary(s: f64, t: f64) -> [f64; 3] {
    [1.0 - t, s, t - s]
}

impl FemP1 {
    pub(crate) fn new(domain: &Domain, cells: usize, quadrature: Option<usize>) -> Self {
        let dim = domain.dim();
        let mut lower = [0.0; 2];
        let mut side = [1.0; 2];
        let mut h = [1.0; 2];
        for a in 0..dim {
            lower[a] = domain.lower()[a];
            side[a] = domain.side(a);
            h[a] = side[a] / cells as f64;
        }
        FemP1 {
            dim,
            cells,
            lower,
            side,
            h,
            element_points: quadrature.unwrap_or(DEFAULT_ELEMENT_POINTS),
        }
    }

    pub(crate) fn nodes_per_axis(&self) -> usize {
        self.cells - 1
    }

    fn coord(&self, axis: usize, i: usize) -> f64 {
        if i == self.cells {
            self.lower[axis] + self.side[axis]
        } else {
            self.lower[axis] + self.side[axis] * i as f64 / self.cells as f64
        }
    }

    /// Basis index of mesh vertex `(i, j)`, or `None` on the boundary.
    fn index(&self, v: [usize; 2]) -> Option<usize> {
        let p = self.nodes_per_axis();
        let interior = |i: usize| i >= 1 && i < self.cells;
        if self.dim == 1 {
            interior(v[0]).then(|| v[0] - 1)
        } else {
            (interior(v[0]) && interior(v[1])).then(|| (v[0] - 1) * p + (v[1] - 1))
        }
    }

    pub(crate) fn nodes(&self) -> Vec<Point> {
        let p = self.nodes_per_axis();
        if self.dim == 1 {
            (1..=p).map(|i| Point::x(self.coord(0, i))).collect()
        } else {
            (1..=p)
                .flat_map(|i| (1..=p).map(move |j| (i, j)))
                .map(|(i, j)| Point::xy(self.coord(0, i), self.coord(1, j)))
                .collect()
        }
    }

    fn locate(&self, axis: usize, x: f64) -> (usize, f64) {
        let t = (x - self.lower[axis]) / self.h[axis];
        let c = (t.floor().max(0.0) as usize).min(self.cells - 1);
        (c, t - c as f64)
    }

    /// Nonzero hat values at an interior point of the closure.
    pub(crate) fn local_values(&self, p: &Point) -> Vec<(usize, f64)> {
        let mut out = Vec::with_capacity(3);
        if self.dim == 1 {
            let (c, s) = self.locate(0, p[0]);
            for (off, val) in [(0, 1.0 - s), (1, s)] {
                if let Some(i) = self.index([c + off, 0]) {
                    out.push((i, val));
                }
            }
            return out;
        }
        let (ci, s) = self.locate(0, p[0]);
        let (cj, t) = self.locate(1, p[1]);
        let (verts, bary) = if t <= s {
            (LOWER_TRI, lower_bary(s, t))
        } else {
            (UPPER_TRI, upper_bary(s, t))
        };
        for (v, val) in verts.iter().zip(bary) {
            if let Some(i) = self.index([ci + v[0], cj + v[1]]) {
                out.push((i, val));
            }
        }
        out
    }

    /// Gram and stiffness matrices from closed-form element integrals.
    pub(crate) fn assemble(&self) -> (SymBandMatrix, SymBandMatrix) {
        let p = self.nodes_per_axis();
        if self.dim == 1 {
            let h = self.h[0];
            let mut gram = SymBandMatrix::zeros(p, 1);
            let mut stiff = SymBandMatrix::zeros(p, 1);
            for c in 0..self.cells {
                let ids = [self.index([c, 0]), self.index([c + 1, 0])];
                for a in 0..2 {
                    for b in 0..=a {
                        if let (Some(i), Some(j)) = (ids[a], ids[b]) {
                            let same = a == b;
                            gram.add(i, j, h / 6.0 * if same { 2.0 } else { 1.0 });
                            stiff.add(i, j, if same { 1.0 / h } else { -1.0 / h });
                        }
                    }
                }
            }
            return (gram, stiff);
        }
        let (hx, hy) = (self.h[0], self.h[1]);
        let area = 0.5 * hx * hy;
        let mut gram = SymBandMatrix::zeros(p * p, p + 1);
        let mut stiff = SymBandMatrix::zeros(p * p, p + 1);
        for ci in 0..self.cells {
            for cj in 0..self.cells {
                for (verts, grads) in [(LOWER_TRI, LOWER_GRAD), (UPPER_TRI, UPPER_GRAD)] {
                    let ids: Vec<Option<usize>> = verts
                        .iter()
                        .map(|v| self.index([ci + v[0], cj + v[1]]))
                        .collect();
                    let g: Vec<[f64; 2]> = grads.iter().map(|g| [g[0] / hx, g[1] / hy]).collect();
                    for a in 0..3 {
                        for b in 0..=a {
                            if let (Some(i), Some(j)) = (ids[a], ids[b]) {
                                let m = area / 12.0 * if a == b { 2.0 } else { 1.0 };
                                gram.add(i, j, m);
                                stiff.add(i, j, area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]));
                            }
                        }
                    }
                }
            }
        }
        (gram, stiff)
    }

    pub(crate) fn quadrature_size(&self) -> usize {
        let q = self.element_points;
        if self.dim == 1 {
            self.cells * q
        } else {
            2 * self.cells * self.cells * q * q
        }
    }

    /// Visits every quadrature point with its weight, the element vertex
    /// basis indices and their barycentric values.
    fn for_each_point(&self, mut visit: impl FnMut(&Point, f64, &[Option<usize>], &[f64])) {
        if self.dim == 1 {
            let g = GaussRule::legendre(self.element_points);
            let (u, w) = g.mapped(0.0, 1.0);
            let h = self.h[0];
            for c in 0..self.cells {
                let ids = [self.index([c, 0]), self.index([c + 1, 0])];
                let x0 = self.coord(0, c);
                for (&s, &ws) in u.iter().zip(&w) {
                    visit(&Point::x(x0 + s * h), ws * h, &ids, &[1.0 - s, s]);
                }
            }
            return;
        }
        let rule = collapsed_triangle(self.element_points);
        let (hx, hy) = (self.h[0], self.h[1]);
        let jac = hx * hy;
        for ci in 0..self.cells {
            let x0 = self.coord(0, ci);
            for cj in 0..self.cells {
                let y0 = self.coord(1, cj);
                let lower_ids: Vec<Option<usize>> = LOWER_TRI
                    .iter()
                    .map(|v| self.index([ci + v[0], cj + v[1]]))
                    .collect();
                let upper_ids: Vec<Option<usize>> = UPPER_TRI
                    .iter()
                    .map(|v| self.index([ci + v[0], cj + v[1]]))
                    .collect();
                for &(a, b, w) in &rule {
                    // lower triangle: (s, t) = (a, b) with b <= a
                    let p = Point::xy(x0 + a * hx, y0 + b * hy);
                    visit(&p, w * jac, &lower_ids, &lower_bary(a, b));
                    // upper triangle: (s, t) = (b, a)
                    let p = Point::xy(x0 + b * hx, y0 + a * hy);
                    visit(&p, w * jac, &upper_ids, &upper_bary(b, a));
                }
            }
        }
    }

    pub(crate) fn integrate(&self, g: &dyn Fn(&Point) -> f64) -> f64 {
        let mut total = 0.0;
        self.for_each_point(|p, w, _, _| total += w * g(p));
        total
    }

    pub(crate) fn load_vector(&self, f: &dyn Fn(&Point) -> f64) -> Vec<f64> {
        let p = self.nodes_per_axis();
        let mut b = vec![0.0; p.pow(self.dim as u32)];
        self.for_each_point(|pt, w, ids, bary| {
            let fw = w * f(pt);
            for (id, lam) in ids.iter().zip(bary) {
                if let Some(i) = id {
                    b[*i] += fw * lam;
                }
            }
        });
        b
    }
}

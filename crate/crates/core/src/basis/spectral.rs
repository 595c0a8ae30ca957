use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::geometry::{Domain, Point};
use crate::quadrature::GaussRule;

/// Extra Gauss points beyond `2m` per axis. With `2m` points alone the
/// highest product modes are integrated only to ~1e-3 for small `m`.
const QUADRATURE_MARGIN: usize = 16;

pub(crate) struct SpectralSine {
    dim: usize,
    m: usize,
    lower: [f64; 2],
    side: [f64; 2],
    modes: Vec<[usize; 2]>,
    quad_points: usize,
    rules: OnceLock<Vec<(Vec<f64>, Vec<f64>)>>,
}

impl SpectralSine {
    pub(crate) fn new(domain: &Domain, m: usize, quadrature: Option<usize>) -> Self {
        let dim = domain.dim();
        let mut lower = [0.0; 2];
        let mut side = [1.0; 2];
        for a in 0..dim {
            lower[a] = domain.lower()[a];
            side[a] = domain.side(a);
        }
        let mut modes: Vec<[usize; 2]> = if dim == 1 {
            (1..=m).map(|k| [k, 0]).collect()
        } else {
            (1..=m).flat_map(|j| (1..=m).map(move |k| [j, k])).collect()
        };
        modes.sort_by_key(|&[j, k]| (j + k, j, k));
        SpectralSine {
            dim,
            m,
            lower,
            side,
            modes,
            quad_points: quadrature.unwrap_or(2 * m + QUADRATURE_MARGIN),
            rules: OnceLock::new(),
        }
    }

    pub(crate) fn modes_per_axis(&self) -> usize {
        self.m
    }

    pub(crate) fn modes(&self) -> &[[usize; 2]] {
        &self.modes
    }

    fn wavenumber(&self, axis: usize, k: usize) -> f64 {
        k as f64 * PI / self.side[axis]
    }

    pub(crate) fn eigenvalues(&self) -> Vec<f64> {
        self.modes
            .iter()
            .map(|&[j, k]| {
                let mut mu = self.wavenumber(0, j).powi(2);
                if self.dim == 2 {
                    mu += self.wavenumber(1, k).powi(2);
                }
                mu
            })
            .collect()
    }

    /// `sqrt(2/L) sin(k pi (x - a)/L)` for `k = 1..=m`.
    fn axis_sines(&self, axis: usize, x: f64) -> Vec<f64> {
        let scale = (2.0 / self.side[axis]).sqrt();
        let t = (x - self.lower[axis]) / self.side[axis];
        (1..=self.m)
            .map(|k| scale * (k as f64 * PI * t).sin())
            .collect()
    }

    fn axis_derivatives(&self, axis: usize, x: f64) -> Vec<f64> {
        let scale = (2.0 / self.side[axis]).sqrt();
        let t = (x - self.lower[axis]) / self.side[axis];
        (1..=self.m)
            .map(|k| scale * self.wavenumber(axis, k) * (k as f64 * PI * t).cos())
            .collect()
    }

    fn combine(&self, a: &[f64], b: Option<&[f64]>) -> Vec<f64> {
        match b {
            None => self.modes.iter().map(|&[j, _]| a[j - 1]).collect(),
            Some(b) => self
                .modes
                .iter()
                .map(|&[j, k]| a[j - 1] * b[k - 1])
                .collect(),
        }
    }

    pub(crate) fn eval(&self, p: &Point) -> Vec<f64> {
        let sx = self.axis_sines(0, p[0]);
        if self.dim == 1 {
            return self.combine(&sx, None);
        }
        let sy = self.axis_sines(1, p[1]);
        self.combine(&sx, Some(&sy))
    }

    pub(crate) fn eval_gradients(&self, p: &Point) -> Vec<Vec<f64>> {
        let sx = self.axis_sines(0, p[0]);
        let dx = self.axis_derivatives(0, p[0]);
        if self.dim == 1 {
            return vec![self.combine(&dx, None)];
        }
        let sy = self.axis_sines(1, p[1]);
        let dy = self.axis_derivatives(1, p[1]);
        vec![self.combine(&dx, Some(&sy)), self.combine(&sx, Some(&dy))]
    }

    pub(crate) fn eval_laplacian(&self, p: &Point) -> Vec<f64> {
        let sx = self.axis_sines(0, p[0]);
        let ddx: Vec<f64> = sx
            .iter()
            .enumerate()
            .map(|(i, s)| -self.wavenumber(0, i + 1).powi(2) * s)
            .collect();
        if self.dim == 1 {
            return self.combine(&ddx, None);
        }
        let sy = self.axis_sines(1, p[1]);
        let ddy: Vec<f64> = sy
            .iter()
            .enumerate()
            .map(|(i, s)| -self.wavenumber(1, i + 1).powi(2) * s)
            .collect();
        let a = self.combine(&ddx, Some(&sy));
        let b = self.combine(&sx, Some(&ddy));
        a.iter().zip(&b).map(|(x, y)| x + y).collect()
    }

    fn rules(&self) -> &[(Vec<f64>, Vec<f64>)] {
        self.rules.get_or_init(|| {
            let g = GaussRule::legendre(self.quad_points);
            (0..self.dim)
                .map(|a| g.mapped(self.lower[a], self.lower[a] + self.side[a]))
                .collect()
        })
    }

    pub(crate) fn quadrature_size(&self) -> usize {
        self.quad_points.pow(self.dim as u32)
    }

    pub(crate) fn integrate(&self, g: &dyn Fn(&Point) -> f64) -> f64 {
        let rules = self.rules();
        let (x, wx) = &rules[0];
        if self.dim == 1 {
            return x.iter().zip(wx).map(|(&x, w)| w * g(&Point::x(x))).sum();
        }
        let (y, wy) = &rules[1];
        let mut total = 0.0;
        for (&xa, wa) in x.iter().zip(wx) {
            let row: f64 = y
                .iter()
                .zip(wy)
                .map(|(&yb, wb)| wb * g(&Point::xy(xa, yb)))
                .sum();
            total += wa * row;
        }
        total
    }

    /// Separable evaluation of `b_i = \int f phi_i` on the tensor rule.
    pub(crate) fn load_vector(&self, f: &dyn Fn(&Point) -> f64) -> Vec<f64> {
        let rules = self.rules();
        let m = self.m;
        let (x, wx) = &rules[0];
        let sx: Vec<Vec<f64>> = x.iter().map(|&xa| self.axis_sines(0, xa)).collect();
        if self.dim == 1 {
            let mut b = vec![0.0; m];
            for (a, &xa) in x.iter().enumerate() {
                let fw = wx[a] * f(&Point::x(xa));
                for k in 0..m {
                    b[k] += fw * sx[a][k];
                }
            }
            return self.combine(&b, None);
        }
        let (y, wy) = &rules[1];
        let sy: Vec<Vec<f64>> = y.iter().map(|&yb| self.axis_sines(1, yb)).collect();
        // t[a][k] = sum_b w_b f(x_a, y_b) s_k(y_b)
        let mut coef = vec![0.0; m * m];
        for (a, &xa) in x.iter().enumerate() {
            let mut t = vec![0.0; m];
            for (bi, &yb) in y.iter().enumerate() {
                let fw = wy[bi] * f(&Point::xy(xa, yb));
                for k in 0..m {
                    t[k] += fw * sy[bi][k];
                }
            }
            for j in 0..m {
                let s = wx[a] * sx[a][j];
                for k in 0..m {
                    coef[j * m + k] += s * t[k];
                }
            }
        }
        self.modes
            .iter()
            .map(|&[j, k]| coef[(j - 1) * m + (k - 1)])
            .collect()
    }
}

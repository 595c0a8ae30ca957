//! Symmetric band matrices and their Cholesky factorization.
//!
//! Every operator in this crate is symmetric with a known half-bandwidth:
//! zero for the orthonormal spectral family, the number of interior nodes
//! per row for the P1 family. A dense matrix is the special case
//! `half_bandwidth = n - 1`.

use crate::error::{Error, Result};

/// Symmetric matrix storing the lower band row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl SymBandMatrix {
    pub fn zeros(n: usize, half_bandwidth: usize) -> Self {
        let bw = half_bandwidth.min(n.saturating_sub(1));
        SymBandMatrix {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(vec![1.0; n])
    }

    pub fn diagonal(diag: Vec<f64>) -> Self {
        SymBandMatrix {
            n: diag.len(),
            bw: 0,
            data: diag,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            None
        } else {
            Some(i * (self.bw + 1) + (j + self.bw - i))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to entries `(i, j)` and `(j, i)` (once when `i == j`).
    ///
    /// Panics if the entry lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside half-bandwidth {}", self.bw));
        self.data[s] += v;
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.bw == 0
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let row = &self.data[i * (self.bw + 1)..(i + 1) * (self.bw + 1)];
            let j0 = i.saturating_sub(self.bw);
            for j in j0..i {
                let a = row[j + self.bw - i];
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
            y[i] += row[self.bw] * x[i];
        }
        y
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.matvec(y))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Returns a copy whose band covers the full matrix.
    pub fn widened(&self, half_bandwidth: usize) -> Self {
        let mut out = SymBandMatrix::zeros(self.n, half_bandwidth.max(self.bw));
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..=i {
                let v = self.get(i, j);
                if v != 0.0 {
                    out.add(i, j, v);
                }
            }
        }
        out
    }

    pub fn cholesky(&self) -> Result<BandCholesky> {
        BandCholesky::factor(self)
    }
}

/// Lower-triangular band factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    l: SymBandMatrix,
}

impl BandCholesky {
    pub fn factor(a: &SymBandMatrix) -> Result<Self> {
        let n = a.n;
        let bw = a.bw;
        let w = bw + 1;
        let mut l = a.clone();
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let k0 = j0.max(j.saturating_sub(bw));
                let mut s = l.data[i * w + (j + bw - i)];
                for k in k0..j {
                    s -= l.data[i * w + (k + bw - i)] * l.data[j * w + (k + bw - j)];
                }
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite { pivot: i });
                    }
                    l.data[i * w + bw] = s.sqrt();
                } else {
                    l.data[i * w + (j + bw - i)] = s / l.data[j * w + bw];
                }
            }
        }
        Ok(BandCholesky { l })
    }

    pub fn dim(&self) -> usize {
        self.l.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.n;
        let bw = self.l.bw;
        let w = bw + 1;
        let d = &self.l.data;
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= d[i * w + (k + bw - i)] * y[k];
            }
            y[i] = s / d[i * w + bw];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..(i + 1 + bw).min(n) {
                s -= d[k * w + (i + bw - k)] * y[k];
            }
            y[i] = s / d[i * w + bw];
        }
        y
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `||A x - b|| / ||b||`, or the absolute residual when `b = 0`.
pub fn relative_residual(a: &SymBandMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.matvec(x);
    let r: f64 = ax
        .iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt();
    let nb = norm2(b);
    if nb > 0.0 {
        r / nb
    } else {
        r
    }
}

//! Gauss–Legendre rules on intervals and collapsed rules on triangles.

use std::f64::consts::PI;

/// A one-dimensional rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// `n`-point Gauss–Legendre rule, exact for polynomials of degree `2n - 1`.
    ///
    /// Roots are found by Newton iteration on the three-term recurrence,
    /// seeded with the Tricomi approximation.
    pub fn legendre(n: usize) -> Self {
        assert!(n >= 1, "a Gauss rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let x = self.nodes.iter().map(|t| mid + half * t).collect();
        let w = self.weights.iter().map(|w| w * half).collect();
        (x, w)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Rule on the reference triangle `{(s, t): 0 <= t <= s <= 1}` obtained by
/// collapsing a tensor Gauss rule. Returns `(s, t, weight)` triples whose
/// weights sum to the triangle area `1/2`.
pub fn collapsed_triangle(points_per_axis: usize) -> Vec<(f64, f64, f64)> {
    let g = GaussRule::legendre(points_per_axis);
    let (u, wu) = g.mapped(0.0, 1.0);
    let mut out = Vec::with_capacity(u.len() * u.len());
    for (&s, &ws) in u.iter().zip(&wu) {
        for (&r, &wr) in u.iter().zip(&wu) {
            out.push((s, s * r, ws * wr * s));
        }
    }
    out
}

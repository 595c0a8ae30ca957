#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultrafn::{Domain, Point};

// Tabulated 5-point Gauss-Legendre rule on [-1, 1].
const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Composite 5-point rule on `[a, b]` split into `cells` pieces.
pub fn composite(a: f64, b: f64, cells: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / cells as f64;
    let mut out = Vec::with_capacity(5 * cells);
    for c in 0..cells {
        let mid = a + (c as f64 + 0.5) * h;
        for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

/// Tensor composite rule over the domain.
pub fn rule(d: &Domain, cells: usize) -> Vec<(Point, f64)> {
    let xs = composite(d.lower()[0], d.upper()[0], cells);
    if d.dim() == 1 {
        return xs.into_iter().map(|(x, w)| (Point::x(x), w)).collect();
    }
    let ys = composite(d.lower()[1], d.upper()[1], cells);
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for &(x, wx) in &xs {
        for &(y, wy) in &ys {
            out.push((Point::xy(x, y), wx * wy));
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn interior_point(rng: &mut impl Rng, d: &Domain) -> Point {
    let c: Vec<f64> = (0..d.dim())
        .map(|a| d.lower()[a] + rng.gen_range(0.01..0.99) * d.side(a))
        .collect();
    Point::new(&c).unwrap()
}

pub fn boundary_point(rng: &mut impl Rng, d: &Domain) -> Point {
    let p = interior_point(rng, d);
    let axis = rng.gen_range(0..d.dim());
    let face = if rng.gen_bool(0.5) {
        d.lower()[axis]
    } else {
        d.upper()[axis]
    };
    p.with_coord(axis, face)
}

pub fn random_coeffs(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Green's function of `-u'' = delta_q` on (0, 1) with zero end values.
pub fn green(x: f64, q: f64) -> f64 {
    x.min(q) * (1.0 - x.max(q))
}

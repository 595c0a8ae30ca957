mod common;

use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use ultrafn::ultra::delta_self_energy;
use ultrafn::{delta_at, project, BasisFamily, Domain, Point, SpaceLevel, Ultrafunction};

fn levels() -> &'static [SpaceLevel] {
    static LEVELS: OnceLock<Vec<SpaceLevel>> = OnceLock::new();
    LEVELS.get_or_init(|| {
        vec![
            SpaceLevel::build(&Domain::unit_interval(), BasisFamily::SpectralSine, 64).unwrap(),
            SpaceLevel::build(&Domain::unit_square(), BasisFamily::SpectralSine, 16).unwrap(),
            SpaceLevel::build(
                &Domain::new(&[0.0, -1.0], &[2.0, 1.0]).unwrap(),
                BasisFamily::SpectralSine,
                7,
            )
            .unwrap(),
            SpaceLevel::build(&Domain::unit_interval(), BasisFamily::FemP1, 6).unwrap(),
            SpaceLevel::build(&Domain::unit_square(), BasisFamily::FemP1, 5).unwrap(),
        ]
    })
}

fn point_in(d: &Domain, t: [f64; 2]) -> Point {
    let c: Vec<f64> = (0..d.dim())
        .map(|a| d.lower()[a] + t[a] * d.side(a))
        .collect();
    Point::new(&c).unwrap()
}

fn smooth(a: [f64; 4]) -> impl Fn(&Point) -> f64 {
    move |p: &Point| {
        let y = if p.dim() > 1 { p[1] } else { 0.0 };
        a[0] + a[1] * p[0] * y + (a[2] * p[0] + a[3] * y).sin() + p[0].exp()
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, ..ProptestConfig::default() })]

    #[test]
    fn reproducing_property(
        which in 0usize..5,
        t in prop::array::uniform2(0.0f64..=1.0),
        seed in any::<u64>(),
    ) {
        let s = &levels()[which];
        let q = point_in(s.domain(), t);
        let v = Ultrafunction::new(s, common::random_coeffs(&mut common::rng(seed), s.n())).unwrap();
        let d = delta_at(s, &q).unwrap();
        let err = (d.inner(&v).unwrap() - v.evaluate(&q).unwrap()).abs();
        prop_assert!(err <= 1e-10 * (1.0 + v.norm()), "err {err}");
    }

    #[test]
    fn projection_is_idempotent(which in 0usize..5, a in prop::array::uniform4(-2.0f64..2.0)) {
        let s = &levels()[which];
        let once = project(s, smooth(a)).unwrap();
        let twice = project(s, |p| once.evaluate(p).unwrap()).unwrap();
        for (x, y) in once.coeffs().iter().zip(twice.coeffs()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn projection_error_is_orthogonal_to_the_level(
        which in 0usize..5,
        a in prop::array::uniform4(-2.0f64..2.0),
        seed in any::<u64>(),
    ) {
        let s = &levels()[which];
        let f = smooth(a);
        let fp = project(s, &f).unwrap();
        let v = Ultrafunction::new(s, common::random_coeffs(&mut common::rng(seed), s.n())).unwrap();
        let gap = s.integrate(|p| (f(p) - fp.evaluate(p).unwrap()) * v.evaluate(p).unwrap());
        prop_assert!(gap.abs() <= 1e-10, "gap {gap}");
    }

    #[test]
    fn delta_self_energy_chain(which in 0usize..5, t in prop::array::uniform2(0.0f64..=1.0)) {
        let s = &levels()[which];
        let q = point_in(s.domain(), t);
        let d = delta_at(s, &q).unwrap();
        let a = d.inner(&d).unwrap();
        let b = d.evaluate(&q).unwrap();
        let c = delta_self_energy(s, &q).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a));
        prop_assert!((b - c).abs() <= 1e-10 * (1.0 + a));
        if s.is_orthonormal() {
            let sum: f64 = s.eval_basis(&q).unwrap().iter().map(|e| e * e).sum();
            prop_assert!((a - sum).abs() <= 1e-10 * (1.0 + a));
        }
    }
}

#[test]
fn span_members_project_to_themselves() {
    let mut rng = common::rng(5);
    for s in levels() {
        let u = Ultrafunction::new(s, common::random_coeffs(&mut rng, s.n())).unwrap();
        let p = project(s, |x| u.evaluate(x).unwrap()).unwrap();
        for (a, b) in u.coeffs().iter().zip(p.coeffs()) {
            assert!((a - b).abs() <= 1e-12, "{:?}", s.id());
        }
        let e = Ultrafunction::basis_function(s, 0).unwrap();
        let pe = project(s, |x| e.evaluate(x).unwrap()).unwrap();
        assert!((pe.coeffs()[0] - 1.0).abs() <= 1e-12);
        assert!(pe.coeffs()[1..].iter().all(|c| c.abs() <= 1e-12));
    }
}

#[test]
fn identity_function_coefficients() {
    let s = SpaceLevel::build(&Domain::unit_interval(), BasisFamily::SpectralSine, 64).unwrap();
    let c = project(&s, |p| p[0]).unwrap();
    for (i, ci) in c.coeffs().iter().enumerate() {
        let k = (i + 1) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let oracle = SQRT_2 * sign / (k * PI);
        assert!((ci - oracle).abs() <= 1e-12, "k={k}: {ci} vs {oracle}");
    }
}

#[test]
fn fem_delta_matches_dense_gram_solve() {
    let s = SpaceLevel::build(&Domain::unit_square(), BasisFamily::FemP1, 4).unwrap();
    let n = s.n();
    let g = DMatrix::from_fn(n, n, |i, j| s.gram().get(i, j));
    let chol = g.cholesky().unwrap();
    let mut rng = common::rng(3);
    let nodes = s.fem_nodes().unwrap();
    for q in nodes
        .iter()
        .step_by(17)
        .copied()
        .chain([Point::xy(0.123, 0.877)])
    {
        let k = DVector::from_vec(s.eval_basis(&q).unwrap());
        let oracle = chol.solve(&k);
        let d = delta_at(&s, &q).unwrap();
        for (a, b) in d.coeffs().iter().zip(oracle.iter()) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
        for _ in 0..50 {
            let v = Ultrafunction::new(&s, common::random_coeffs(&mut rng, n)).unwrap();
            assert!((d.inner(&v).unwrap() - v.evaluate(&q).unwrap()).abs() <= 1e-10);
        }
    }
}

#[test]
fn delta_examples() {
    let s = SpaceLevel::build(&Domain::unit_interval(), BasisFamily::SpectralSine, 2).unwrap();
    let d = delta_at(&s, &Point::x(0.5)).unwrap();
    assert!((d.coeffs()[0] - SQRT_2).abs() < 1e-15 && d.coeffs()[1].abs() < 1e-15);
    let e1 = Ultrafunction::basis_function(&s, 0).unwrap();
    assert!((d.inner(&e1).unwrap() - SQRT_2).abs() < 1e-15);
    for s in levels() {
        let d = s.domain();
        let q = d.center().with_coord(0, d.lower()[0]);
        assert!(delta_at(s, &q).unwrap().is_zero());
        let outside = d.center().with_coord(0, d.upper()[0] + 0.1);
        assert!(delta_at(s, &outside).is_err());
    }
}

#[test]
fn delta_squared_is_pointwise() {
    let s = &levels()[1];
    let q = Point::xy(0.3, 0.6);
    let d = delta_at(s, &q).unwrap();
    let mut rng = common::rng(9);
    for _ in 0..10 {
        let x = common::interior_point(&mut rng, s.domain());
        let v = d.evaluate(&x).unwrap();
        let sq = v * v;
        assert!(sq.is_finite() && sq >= 0.0);
        assert_eq!(sq, d.evaluate(&x).unwrap().powi(2));
    }
}

#[test]
fn inner_products_examples() {
    let s = &levels()[0];
    let e1 = Ultrafunction::basis_function(s, 0).unwrap();
    let e2 = Ultrafunction::basis_function(s, 1).unwrap();
    assert_eq!(e1.inner(&e1).unwrap(), 1.0);
    assert_eq!(e1.inner(&e2).unwrap(), 0.0);
    let f = &levels()[4];
    let mut rng = common::rng(1);
    for _ in 0..20 {
        let u = Ultrafunction::new(f, common::random_coeffs(&mut rng, f.n())).unwrap();
        assert!(u.inner(&u).unwrap() > 0.0);
    }
    let zero = Ultrafunction::zero(f);
    assert_eq!(zero.evaluate(&Point::xy(0.4, 0.4)).unwrap(), 0.0);
    assert!(project(f, |_| 0.0).unwrap().is_zero());
}

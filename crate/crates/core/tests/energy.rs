mod common;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use ultrafn::{
    energy_at, minimize, reduced_gradient, BasisFamily, Domain, Membership, Point, SearchOptions,
    SpaceLevel,
};

fn level(d: &Domain, family: BasisFamily, l: u32) -> SpaceLevel {
    SpaceLevel::build(d, family, l).unwrap()
}

/// Energy on the unit square summed directly from the sine series.
fn series_energy(m: usize, x: f64, y: f64) -> f64 {
    let mut f = 0.0;
    for j in 1..=m {
        for k in 1..=m {
            let e = 2.0 * (j as f64 * PI * x).sin() * (k as f64 * PI * y).sin();
            f += e * e / (PI * PI * ((j * j + k * k) as f64));
        }
    }
    -0.5 * f
}

#[test]
fn energy_examples() {
    let s = level(&Domain::unit_interval(), BasisFamily::SpectralSine, 1);
    assert!((energy_at(&s, &Point::x(0.5)).unwrap().total + 1.0 / (PI * PI)).abs() < 1e-15);
    let s = level(&Domain::unit_interval(), BasisFamily::SpectralSine, 1000);
    let r = energy_at(&s, &Point::x(0.3)).unwrap();
    assert!((r.total + 0.3 * 0.7 / 2.0).abs() <= 1e-3);
    assert_eq!(energy_at(&s, &Point::x(1.0)).unwrap().total, 0.0);
}

#[test]
fn energy_identities_at_random_points() {
    let mut rng = common::rng(77);
    for (d, family, l) in [
        (Domain::unit_interval(), BasisFamily::SpectralSine, 64),
        (Domain::unit_square(), BasisFamily::SpectralSine, 16),
        (Domain::unit_interval(), BasisFamily::FemP1, 6),
        (Domain::unit_square(), BasisFamily::FemP1, 5),
    ] {
        let s = level(&d, family, l);
        for _ in 0..50 {
            let q = common::interior_point(&mut rng, &d);
            let r = energy_at(&s, &q).unwrap();
            assert_eq!(r.total, r.elastic + r.point_value);
            assert!((r.total + r.elastic).abs() <= 1e-9 * r.elastic);
            assert!((r.electrostatic + r.total).abs() <= 1e-9 * r.elastic);
            assert!(r.total < 0.0);
        }
        for _ in 0..20 {
            let q = common::boundary_point(&mut rng, &d);
            assert_eq!(energy_at(&s, &q).unwrap().total, 0.0);
        }
    }
}

#[test]
fn reduced_gradient_matches_central_differences() {
    let mut rng = common::rng(8);
    let h = 1e-6;
    for (d, l) in [
        (Domain::unit_interval(), 8),
        (Domain::unit_interval(), 64),
        (Domain::unit_square(), 12),
    ] {
        let s = level(&d, BasisFamily::SpectralSine, l);
        for _ in 0..20 {
            let q = common::interior_point(&mut rng, &d);
            let g = reduced_gradient(&s, &q).unwrap();
            for axis in 0..d.dim() {
                let f = |x: f64| energy_at(&s, &q.with_coord(axis, x)).unwrap().total;
                let fd = (f(q[axis] + h) - f(q[axis] - h)) / (2.0 * h);
                assert!((g[axis] - fd).abs() <= 1e-5, "{} vs {fd}", g[axis]);
            }
        }
    }
    let s = level(&Domain::unit_square(), BasisFamily::SpectralSine, 9);
    assert!(reduced_gradient(&s, &Point::xy(0.5, 0.5))
        .unwrap()
        .iter()
        .all(|g| g.abs() < 1e-10));
    let f = level(&Domain::unit_square(), BasisFamily::FemP1, 3);
    assert!(reduced_gradient(&f, &Point::xy(0.5, 0.5)).is_err());
}

#[test]
fn interval_minimizer() {
    let opts = SearchOptions::default();
    for (family, l) in [
        (BasisFamily::SpectralSine, 5),
        (BasisFamily::SpectralSine, 64),
        (BasisFamily::SpectralSine, 1000),
        (BasisFamily::FemP1, 7),
    ] {
        let s = level(&Domain::unit_interval(), family, l);
        let r = minimize(&s, &opts).unwrap();
        assert!(
            (r.q_min[0] - 0.5).abs() <= 1e-6,
            "{family} {l}: {:?}",
            r.q_min
        );
        assert!(r.f_min < 0.0);
        if l == 1000 {
            assert!((r.f_min + 0.125).abs() <= 1e-3);
        }
    }
}

#[test]
fn square_minimizer_odd_levels_sit_at_the_center() {
    let s = level(&Domain::unit_square(), BasisFamily::SpectralSine, 15);
    let r = minimize(&s, &SearchOptions::default()).unwrap();
    assert!(r.q_min.distance(&Point::xy(0.5, 0.5)) <= 1e-6);
    let fem = level(&Domain::unit_square(), BasisFamily::FemP1, 5);
    let rf = minimize(&fem, &SearchOptions::default()).unwrap();
    assert!(rf.q_min.distance(&Point::xy(0.5, 0.5)) <= 1e-6);
}

#[test]
fn square_minimizer_even_levels_leave_the_center() {
    // for even m the truncated series has four symmetric minima around the
    // center; the center itself is only a saddle of F
    let s = level(&Domain::unit_square(), BasisFamily::SpectralSine, 16);
    let r = minimize(&s, &SearchOptions::default()).unwrap();
    let center = energy_at(&s, &Point::xy(0.5, 0.5)).unwrap().total;
    assert!(r.f_min < center - 1e-3);
    let oracle = (0..=2000)
        .map(|i| 0.4 + 0.1 * i as f64 / 2000.0)
        .map(|x| (series_energy(16, x, x), x))
        .fold((f64::INFINITY, 0.0), |a, b| if b.0 < a.0 { b } else { a });
    assert!(
        (r.f_min - oracle.0).abs() <= 1e-8,
        "{} vs {}",
        r.f_min,
        oracle.0
    );
    assert!((r.q_min[0] - oracle.1).abs() <= 1e-4 && (r.q_min[1] - oracle.1).abs() <= 1e-4);
    assert_eq!(r.ties.len(), 4);
    assert_eq!(r.ties[0].coords(), &[0.46875, 0.46875]);
}

#[test]
fn minimizer_is_interior_and_consistent() {
    let opts = SearchOptions::default();
    for (d, family, l) in [
        (Domain::unit_interval(), BasisFamily::SpectralSine, 3),
        (Domain::new(&[-1.0], &[2.0]).unwrap(), BasisFamily::FemP1, 5),
        (Domain::unit_square(), BasisFamily::SpectralSine, 8),
        (
            Domain::new(&[0.0, 0.0], &[2.0, 1.0]).unwrap(),
            BasisFamily::SpectralSine,
            16,
        ),
        (
            Domain::new(&[0.0, 0.0], &[2.0, 1.0]).unwrap(),
            BasisFamily::FemP1,
            4,
        ),
    ] {
        let s = level(&d, family, l);
        let r = minimize(&s, &opts).unwrap();
        assert_eq!(d.contains(&r.q_min).unwrap(), Membership::Interior);
        assert!(r.f_min < 0.0);
        assert!((r.f_min - energy_at(&s, &r.q_min).unwrap().total).abs() <= 1e-12);
        // no coarse grid point beats the refined minimum
        for p in d.grid(opts.grid) {
            assert!(energy_at(&s, &p).unwrap().total >= r.f_min);
        }
    }
}

#[test]
fn minimum_energy_does_not_increase_along_the_chain() {
    let opts = SearchOptions::default();
    for (d, family, levels) in [
        (
            Domain::unit_interval(),
            BasisFamily::SpectralSine,
            vec![1, 2, 4, 8, 16, 32],
        ),
        (
            Domain::unit_square(),
            BasisFamily::SpectralSine,
            vec![2, 4, 8, 16],
        ),
        (
            Domain::unit_interval(),
            BasisFamily::FemP1,
            vec![1, 2, 3, 4, 5],
        ),
        (Domain::unit_square(), BasisFamily::FemP1, vec![1, 2, 3, 4]),
    ] {
        let f: Vec<f64> = levels
            .iter()
            .map(|&l| minimize(&level(&d, family, l), &opts).unwrap().f_min)
            .collect();
        assert!(
            f.windows(2).all(|w| w[1] <= w[0] + 1e-14),
            "{family}: {f:?}"
        );
    }
}

#[test]
fn point_source_solves_the_unconstrained_minimization() {
    for (d, family, l) in [
        (Domain::unit_square(), BasisFamily::SpectralSine, 7),
        (Domain::unit_square(), BasisFamily::FemP1, 3),
    ] {
        let s = level(&d, family, l);
        let r = minimize(&s, &SearchOptions::default()).unwrap();
        let n = s.n();
        // E(c) = c'Kc / 2 + k(q)'c has its minimizer at K c = -k(q)
        let k = DMatrix::from_fn(n, n, |i, j| s.stiffness().get(i, j));
        let kq = DVector::from_vec(s.eval_basis(&r.q_min).unwrap());
        let c = k.clone().cholesky().unwrap().solve(&(-&kq));
        let e_min = 0.5 * c.dot(&(&k * &c)) + kq.dot(&c);
        let u = ultrafn::solve_point_source(&s, &r.q_min).unwrap().u;
        for (a, b) in u.coeffs().iter().zip(c.iter()) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-6));
        }
        assert!((e_min - r.f_min).abs() <= 1e-12);
    }
}

#[test]
fn fem_and_spectral_minimizers_agree() {
    let opts = SearchOptions::default();
    let d = Domain::unit_square();
    let spec = minimize(&level(&d, BasisFamily::SpectralSine, 16), &opts).unwrap();
    let fem = minimize(&level(&d, BasisFamily::FemP1, 5), &opts).unwrap();
    for axis in 0..2 {
        assert!((spec.q_min[axis] - fem.q_min[axis]).abs() <= 1.0 / 32.0);
    }
}

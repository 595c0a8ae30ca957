use std::ffi::CStr;
use std::ptr;

use ultrafn_ffi::*;

fn new_level(family: UfFamily, lower: &[f64], upper: &[f64], level: u32) -> *mut UfLevel {
    let mut h = ptr::null_mut();
    let st = unsafe {
        uf_level_new(
            family,
            lower.len(),
            lower.as_ptr(),
            upper.as_ptr(),
            level,
            0,
            &mut h,
        )
    };
    assert_eq!(st, UfStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    let p = uf_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn basis_and_delta_round_trip() {
    let h = new_level(UfFamily::SpectralSine, &[0.0], &[1.0], 2);
    unsafe {
        assert_eq!(uf_level_dimension(h), 2);
        assert_eq!(uf_level_spatial_dim(h), 1);
        let q = [0.5];
        let mut e = [0.0; 2];
        assert_eq!(
            uf_eval_basis(h, q.as_ptr(), e.as_mut_ptr(), 2),
            UfStatus::Ok
        );
        assert!((e[0] - 2f64.sqrt()).abs() < 1e-15 && e[1].abs() < 1e-15);
        let mut d = [0.0; 2];
        assert_eq!(
            uf_delta_coefficients(h, q.as_ptr(), d.as_mut_ptr(), 2),
            UfStatus::Ok
        );
        assert_eq!(d, e);
        uf_level_free(h);
    }
}

#[test]
fn energy_and_solution_agree() {
    let h = new_level(UfFamily::FemP1, &[0.0, 0.0], &[1.0, 1.0], 3);
    unsafe {
        let n = uf_level_dimension(h);
        assert_eq!(n, 49);
        let q = [0.3, 0.6];
        let mut c = vec![0.0; n];
        let mut from_solve = UfEnergyReport::default();
        assert_eq!(
            uf_solve_point_source(h, q.as_ptr(), c.as_mut_ptr(), n, &mut from_solve),
            UfStatus::Ok
        );
        let mut r = UfEnergyReport::default();
        assert_eq!(uf_energy_at(h, q.as_ptr(), &mut r), UfStatus::Ok);
        assert!((r.total - from_solve.total).abs() < 1e-14);
        assert!((r.total + r.elastic).abs() < 1e-9 * r.elastic);
        assert!(c.iter().all(|v| *v <= 0.0));
        assert_eq!(
            uf_solve_point_source(h, q.as_ptr(), c.as_mut_ptr(), n, ptr::null_mut()),
            UfStatus::Ok
        );
        uf_level_free(h);
    }
}

#[test]
fn minimize_interval() {
    let h = new_level(UfFamily::SpectralSine, &[0.0], &[1.0], 64);
    let mut m = UfMinimum::default();
    unsafe {
        assert_eq!(uf_minimize(h, 0, 0.0, &mut m), UfStatus::Ok);
        uf_level_free(h);
    }
    assert_eq!(m.dim, 1);
    assert!((m.q[0] - 0.5).abs() < 1e-6);
    assert!(m.f_min < 0.0);
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut h = ptr::null_mut();
        let (lo, hi) = ([1.0], [0.0]);
        assert_eq!(
            uf_level_new(
                UfFamily::SpectralSine,
                1,
                lo.as_ptr(),
                hi.as_ptr(),
                3,
                0,
                &mut h
            ),
            UfStatus::InvalidArgument
        );
        assert!(h.is_null());
        assert!(last_error().contains("axis 0"), "{}", last_error());

        let (lo, hi) = ([0.0, 0.0], [1.0, 1.0]);
        assert_eq!(
            uf_level_new(
                UfFamily::SpectralSine,
                2,
                lo.as_ptr(),
                hi.as_ptr(),
                300,
                1000,
                &mut h
            ),
            UfStatus::ResourceLimit
        );
        assert_eq!(
            uf_level_new(
                UfFamily::SpectralSine,
                3,
                lo.as_ptr(),
                hi.as_ptr(),
                3,
                0,
                &mut h
            ),
            UfStatus::InvalidArgument
        );
        assert_eq!(
            uf_level_new(
                UfFamily::SpectralSine,
                2,
                ptr::null(),
                hi.as_ptr(),
                3,
                0,
                &mut h
            ),
            UfStatus::NullPointer
        );

        let h = new_level(UfFamily::SpectralSine, &[0.0, 0.0], &[1.0, 1.0], 3);
        let mut small = [0.0; 4];
        let q = [0.5, 0.5];
        assert_eq!(
            uf_eval_basis(h, q.as_ptr(), small.as_mut_ptr(), 4),
            UfStatus::BufferTooSmall
        );
        let mut buf = [0.0; 9];
        let out = [1.5, 0.5];
        assert_eq!(
            uf_eval_basis(h, out.as_ptr(), buf.as_mut_ptr(), 9),
            UfStatus::ExteriorPoint
        );
        let nan = [f64::NAN, 0.5];
        assert_eq!(
            uf_eval_basis(h, nan.as_ptr(), buf.as_mut_ptr(), 9),
            UfStatus::InvalidArgument
        );
        assert_eq!(
            uf_eval_basis(ptr::null(), q.as_ptr(), buf.as_mut_ptr(), 9),
            UfStatus::NullPointer
        );
        assert_eq!(
            uf_energy_at(h, q.as_ptr(), ptr::null_mut()),
            UfStatus::NullPointer
        );
        uf_level_free(h);
        uf_level_free(ptr::null_mut());
        assert_eq!(uf_level_dimension(ptr::null()), 0);

        let name = CStr::from_ptr(uf_status_name(UfStatus::BufferTooSmall));
        assert_eq!(name.to_str().unwrap(), "buffer too small");
    }
}

#[test]
fn fem_has_no_pointwise_gradient_but_still_minimizes() {
    let h = new_level(UfFamily::FemP1, &[0.0, 0.0], &[2.0, 1.0], 3);
    let mut m = UfMinimum::default();
    unsafe {
        assert_eq!(uf_minimize(h, 9, 1e-6, &mut m), UfStatus::Ok);
        uf_level_free(h);
    }
    assert_eq!(m.dim, 2);
    assert!(m.q[0] > 0.0 && m.q[0] < 2.0 && m.q[1] > 0.0 && m.q[1] < 1.0);
}

//! C interface to `ultrafn`.
//!
//! Levels are opaque handles created with `uf_level_new` and released with
//! `uf_level_free`. Every other call returns a `UfStatus`; on failure a
//! description is available from `uf_last_error` on the same thread until the
//! next failing call. Points are passed as `dim` consecutive doubles and
//! vectors are written into caller-owned buffers whose length is checked.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ultrafn::{
    delta_at, energy_at, minimize, solve_point_source, BasisFamily, Domain, Error, LevelOptions,
    Point, SearchOptions, SpaceLevel,
};

/// Opaque handle to one discretization level.
pub struct UfLevel {
    inner: SpaceLevel,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    ExteriorPoint = 4,
    ResourceLimit = 5,
    NumericalFailure = 6,
    Unsupported = 7,
    BufferTooSmall = 8,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UfFamily {
    SpectralSine = 0,
    FemP1 = 1,
}

/// Energy decomposition at one point-mass position.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UfEnergyReport {
    pub elastic: f64,
    pub point_value: f64,
    pub total: f64,
    pub electrostatic: f64,
}

/// Result of `uf_minimize`; only the first `dim` entries of `q` are used.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UfMinimum {
    pub q: [f64; 2],
    pub dim: usize,
    pub f_min: f64,
    pub iterations: usize,
    pub ties: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> UfStatus {
    match e {
        Error::DimensionMismatch { .. } => UfStatus::DimensionMismatch,
        Error::ExteriorPoint(_) => UfStatus::ExteriorPoint,
        Error::ResourceLimit { .. } => UfStatus::ResourceLimit,
        Error::NotPositiveDefinite { .. } | Error::Residual { .. } | Error::NonFinite(_) => {
            UfStatus::NumericalFailure
        }
        Error::Unsupported { .. } => UfStatus::Unsupported,
        Error::InvalidDomain(_)
        | Error::InvalidArgument(_)
        | Error::LevelMismatch
        | Error::Config(_)
        | Error::Io(_) => UfStatus::InvalidArgument,
    }
}

/// Internal failure: a status plus its message.
struct Fail(UfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> UfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => UfStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            UfStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(UfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn level_ref<'a>(level: *const UfLevel) -> Result<&'a SpaceLevel, Fail> {
    // SAFETY: the caller passes a handle from `uf_level_new` that has not been freed
    unsafe { level.as_ref() }
        .map(|l| &l.inner)
        .ok_or_else(|| null("level"))
}

unsafe fn read_point(level: &SpaceLevel, q: *const f64) -> Result<Point, Fail> {
    if q.is_null() {
        return Err(null("q"));
    }
    let dim = level.domain().dim();
    // SAFETY: the caller guarantees `q` points to `dim` doubles
    let coords = unsafe { std::slice::from_raw_parts(q, dim) };
    // a non-finite coordinate is a bad argument here, not a numerical failure
    Point::new(coords).map_err(|e| Fail(UfStatus::InvalidArgument, e.to_string()))
}

unsafe fn write_vec(values: &[f64], out: *mut f64, out_len: usize) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    if out_len < values.len() {
        return Err(Fail(
            UfStatus::BufferTooSmall,
            format!("buffer holds {out_len} values, {} needed", values.len()),
        ));
    }
    // SAFETY: `out` is valid for `out_len >= values.len()` writes
    unsafe { ptr::copy_nonoverlapping(values.as_ptr(), out, values.len()) };
    Ok(())
}

/// Builds a level on the box `[lower, upper]` of dimension `dim` (1 or 2).
/// `max_n = 0` selects the default size cap. On success `*out` owns the new
/// handle.
///
/// # Safety
/// `lower` and `upper` must point to `dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn uf_level_new(
    family: UfFamily,
    dim: usize,
    lower: *const f64,
    upper: *const f64,
    level: u32,
    max_n: usize,
    out: *mut *mut UfLevel,
) -> UfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if lower.is_null() || upper.is_null() {
            return Err(null("bounds"));
        }
        if !(1..=2).contains(&dim) {
            return Err(Fail(
                UfStatus::InvalidArgument,
                format!("dimension {dim} is not 1 or 2"),
            ));
        }
        // SAFETY: both bounds point to `dim` doubles
        let (lo, hi) = unsafe {
            (
                std::slice::from_raw_parts(lower, dim),
                std::slice::from_raw_parts(upper, dim),
            )
        };
        let domain = Domain::new(lo, hi)?;
        let family = match family {
            UfFamily::SpectralSine => BasisFamily::SpectralSine,
            UfFamily::FemP1 => BasisFamily::FemP1,
        };
        let mut opts = LevelOptions::default();
        if max_n > 0 {
            opts.max_n = max_n;
        }
        let inner = SpaceLevel::build_with(&domain, family, level, opts)?;
        // SAFETY: checked non-null above
        unsafe { *out = Box::into_raw(Box::new(UfLevel { inner })) };
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `level` must come from `uf_level_new` and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn uf_level_free(level: *mut UfLevel) {
    if !level.is_null() {
        // SAFETY: ownership returns from the caller
        drop(unsafe { Box::from_raw(level) });
    }
}

/// Number of basis functions, or 0 for a null handle.
///
/// # Safety
/// `level` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn uf_level_dimension(level: *const UfLevel) -> usize {
    unsafe { level.as_ref() }.map_or(0, |l| l.inner.n())
}

/// Spatial dimension (1 or 2), or 0 for a null handle.
///
/// # Safety
/// `level` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn uf_level_spatial_dim(level: *const UfLevel) -> usize {
    unsafe { level.as_ref() }.map_or(0, |l| l.inner.domain().dim())
}

/// Writes the value of every basis function at `q` into `out`.
///
/// # Safety
/// `q` must point to the level's spatial dimension of doubles and `out` to
/// `out_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn uf_eval_basis(
    level: *const UfLevel,
    q: *const f64,
    out: *mut f64,
    out_len: usize,
) -> UfStatus {
    guard(|| unsafe {
        let s = level_ref(level)?;
        let p = read_point(s, q)?;
        write_vec(&s.eval_basis(&p)?, out, out_len)
    })
}

/// Coefficients of the point-evaluation representer at `q`.
///
/// # Safety
/// As for `uf_eval_basis`.
#[no_mangle]
pub unsafe extern "C" fn uf_delta_coefficients(
    level: *const UfLevel,
    q: *const f64,
    out: *mut f64,
    out_len: usize,
) -> UfStatus {
    guard(|| unsafe {
        let s = level_ref(level)?;
        let p = read_point(s, q)?;
        write_vec(delta_at(s, &p)?.coeffs(), out, out_len)
    })
}

/// Coefficients of the membrane deflection under a unit point mass at `q`.
/// `report` may be null.
///
/// # Safety
/// As for `uf_eval_basis`; `report`, if non-null, must be writable.
#[no_mangle]
pub unsafe extern "C" fn uf_solve_point_source(
    level: *const UfLevel,
    q: *const f64,
    out: *mut f64,
    out_len: usize,
    report: *mut UfEnergyReport,
) -> UfStatus {
    guard(|| unsafe {
        let s = level_ref(level)?;
        let p = read_point(s, q)?;
        let sol = solve_point_source(s, &p)?;
        write_vec(sol.u.coeffs(), out, out_len)?;
        if let Some(r) = report.as_mut() {
            let pv = sol.point_value.unwrap_or(0.0);
            *r = UfEnergyReport {
                elastic: sol.elastic,
                point_value: pv,
                total: sol.elastic + pv,
                electrostatic: sol.elastic,
            };
        }
        Ok(())
    })
}

/// Energy decomposition with the point mass at `q`.
///
/// # Safety
/// `q` must point to the level's spatial dimension of doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn uf_energy_at(
    level: *const UfLevel,
    q: *const f64,
    out: *mut UfEnergyReport,
) -> UfStatus {
    guard(|| unsafe {
        let s = level_ref(level)?;
        let p = read_point(s, q)?;
        let r = energy_at(s, &p)?;
        *out.as_mut().ok_or_else(|| null("out"))? = UfEnergyReport {
            elastic: r.elastic,
            point_value: r.point_value,
            total: r.total,
            electrostatic: r.electrostatic,
        };
        Ok(())
    })
}

/// Minimizes the energy over the point position. `grid = 0` and `tol <= 0`
/// select the defaults (33 points per axis, 1e-8).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn uf_minimize(
    level: *const UfLevel,
    grid: usize,
    tol: f64,
    out: *mut UfMinimum,
) -> UfStatus {
    guard(|| unsafe {
        let s = level_ref(level)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let mut opts = SearchOptions::default();
        if grid > 0 {
            opts.grid = grid;
        }
        if tol > 0.0 {
            opts.tol = tol;
        }
        let r = minimize(s, &opts)?;
        let mut q = [0.0; 2];
        q[..r.q_min.dim()].copy_from_slice(r.q_min.coords());
        *out = UfMinimum {
            q,
            dim: r.q_min.dim(),
            f_min: r.f_min,
            iterations: r.iterations,
            ties: r.ties.len(),
        };
        Ok(())
    })
}

/// Message of the last failure on this thread, or null if none. The string
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn uf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn uf_status_name(status: UfStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        UfStatus::Ok => b"ok\0",
        UfStatus::NullPointer => b"null pointer\0",
        UfStatus::InvalidArgument => b"invalid argument\0",
        UfStatus::DimensionMismatch => b"dimension mismatch\0",
        UfStatus::ExteriorPoint => b"exterior point\0",
        UfStatus::ResourceLimit => b"resource limit\0",
        UfStatus::NumericalFailure => b"numerical failure\0",
        UfStatus::Unsupported => b"unsupported\0",
        UfStatus::BufferTooSmall => b"buffer too small\0",
        UfStatus::Panic => b"panic\0",
    };
    s.as_ptr().cast()
}

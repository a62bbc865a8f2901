//! C interface to `warp-einstein`.
//!
//! Profiles are opaque handles created by [`we_catalog_sample`],
//! [`we_profile_from_arrays`] or [`we_integrate`] and released with
//! [`we_profile_free`]. Every fallible call returns a [`WeStatus`]; on
//! failure [`we_last_error`] describes what went wrong on the calling thread.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use warp_einstein::catalog::{self, Constants};
use warp_einstein::profile::ProfileColumns;
use warp_einstein::solver::{EndpointClass, EndpointKind, OutputGrid};
use warp_einstein::{integrate, verify, Error, IntegrateOptions, IvpState, Profile, SpaceParams, Verdict};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeStatus {
    Ok = 0,
    /// The verification ran and the profile failed it.
    VerdictFail = 1,
    /// Bad parameters, family name, constants or grid.
    InvalidArgument = 2,
    /// Singularity, blow-up or non-convergence.
    Numerical = 3,
    NullPointer = 4,
    Panic = 5,
}

/// Dimensions and Einstein constants.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WeParams {
    pub n: u32,
    pub m: u32,
    pub lambda: f64,
    pub k: f64,
}

/// One sampled point of a profile.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WePoint {
    pub t: f64,
    pub u: f64,
    pub du: f64,
    pub ddu: f64,
    pub dddu: f64,
    pub f: f64,
    pub df: f64,
    pub ddf: f64,
}

/// Initial data. `ddf` is read only when `has_ddf` is nonzero.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WeInitial {
    pub t: f64,
    pub u: f64,
    pub du: f64,
    pub f: f64,
    pub df: f64,
    pub has_ddf: i32,
    pub ddf: f64,
}

/// Residual norms of a verification.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WeResiduals {
    pub passed: i32,
    pub r_second: f64,
    pub r_compat: f64,
    pub r_first: f64,
    pub r_second_norm: f64,
    pub r_compat_norm: f64,
    pub r_first_norm: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub mu_mean: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeEndpointKind {
    Boundary = 0,
    CriticalMin = 1,
    CriticalMax = 2,
    Infinite = 3,
    Stopped = 4,
}

/// Classification of one end; `t_end` is meaningful when `bounded` is nonzero.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WeEndpoint {
    pub kind: WeEndpointKind,
    pub bounded: i32,
    pub t_end: f64,
}

/// Opaque profile handle.
pub struct WeProfile {
    inner: Profile,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> WeStatus {
    if e.is_numerical() {
        WeStatus::Numerical
    } else {
        WeStatus::InvalidArgument
    }
}

fn guard(f: impl FnOnce() -> Result<WeStatus, (WeStatus, String)>) -> WeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            WeStatus::Panic
        }
    }
}

fn lib<T>(r: warp_einstein::Result<T>) -> Result<T, (WeStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (WeStatus, String) {
    (WeStatus::NullPointer, format!("{what} is null"))
}

fn params(p: &WeParams) -> Result<SpaceParams, (WeStatus, String)> {
    lib(SpaceParams::new(p.n, p.m, p.lambda, p.k))
}

fn opt(x: f64) -> Option<f64> {
    (!x.is_nan()).then_some(x)
}

unsafe fn store(out: *mut *mut WeProfile, profile: Profile) {
    *out = Box::into_raw(Box::new(WeProfile { inner: profile }));
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn we_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Samples a catalog family on `nodes` points strictly inside its domain.
/// NaN constants take the family defaults.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn we_catalog_sample(
    name: *const c_char,
    n: u32,
    m: u32,
    c: f64,
    kbar: f64,
    k: f64,
    nodes: usize,
    out: *mut *mut WeProfile,
) -> WeStatus {
    guard(|| {
        if name.is_null() {
            return Err(null("name"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| (WeStatus::InvalidArgument, "name is not UTF-8".to_string()))?;
        if nodes < 2 {
            return Err((WeStatus::InvalidArgument, "nodes must be at least 2".into()));
        }
        let constants = Constants { c: opt(c), kbar: opt(kbar), k: opt(k) };
        let fam = lib(catalog::instantiate(name, n, m, &constants))?;
        let profile = lib(fam.sample(&fam.interior_grid(nodes)))?;
        store(out, profile);
        Ok(WeStatus::Ok)
    })
}

/// Builds a profile from sampled `t`, `u`, `f`; derivatives are
/// reconstructed by finite differences.
///
/// # Safety
/// `t`, `u`, `f` must each point to `len` readable doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn we_profile_from_arrays(
    p: WeParams,
    t: *const f64,
    u: *const f64,
    f: *const f64,
    len: usize,
    out: *mut *mut WeProfile,
) -> WeStatus {
    guard(|| {
        if t.is_null() || u.is_null() || f.is_null() {
            return Err(null("input array"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let cols = ProfileColumns {
            t: std::slice::from_raw_parts(t, len).to_vec(),
            u: std::slice::from_raw_parts(u, len).to_vec(),
            f: std::slice::from_raw_parts(f, len).to_vec(),
            ..Default::default()
        };
        let profile = lib(Profile::from_columns(params(&p)?, cols))?;
        store(out, profile);
        Ok(WeStatus::Ok)
    })
}

/// Integrates the initial-value problem over `[t_lo, t_hi]` (infinite ends
/// allowed) and samples `nodes` points of the covered interval.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn we_integrate(
    p: WeParams,
    init: WeInitial,
    t_lo: f64,
    t_hi: f64,
    tol: f64,
    cross_boundary: i32,
    nodes: usize,
    out: *mut *mut WeProfile,
) -> WeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !(tol > 0.0) || nodes < 2 {
            return Err((WeStatus::InvalidArgument, "tol must be positive and nodes at least 2".into()));
        }
        let opts = IntegrateOptions {
            tol,
            ddf0: (init.has_ddf != 0).then_some(init.ddf),
            cross_boundary: cross_boundary != 0,
            grid: OutputGrid::Uniform(nodes),
            ..Default::default()
        };
        let state = IvpState::new(init.t, init.u, init.du, init.f, init.df);
        let profile = lib(integrate(&state, &params(&p)?, (t_lo, t_hi), &opts))?;
        store(out, profile);
        Ok(WeStatus::Ok)
    })
}

/// Releases a profile. Null is ignored.
///
/// # Safety
/// `profile` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn we_profile_free(profile: *mut WeProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Number of points; 0 for null.
///
/// # Safety
/// `profile` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn we_profile_len(profile: *const WeProfile) -> usize {
    profile.as_ref().map_or(0, |p| p.inner.len())
}

/// # Safety
/// `profile` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn we_profile_point(profile: *const WeProfile, index: usize, out: *mut WePoint) -> WeStatus {
    guard(|| {
        let p = profile.as_ref().ok_or_else(|| null("profile"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = p
            .inner
            .states
            .get(index)
            .ok_or_else(|| (WeStatus::InvalidArgument, format!("index {index} out of range")))?;
        *out = WePoint { t: s.t, u: s.u, du: s.du, ddu: s.ddu, dddu: s.dddu, f: s.f, df: s.df, ddf: s.ddf };
        Ok(WeStatus::Ok)
    })
}

fn endpoint(e: &EndpointClass) -> WeEndpoint {
    let kind = match e.kind {
        EndpointKind::Boundary => WeEndpointKind::Boundary,
        EndpointKind::CriticalMin => WeEndpointKind::CriticalMin,
        EndpointKind::CriticalMax => WeEndpointKind::CriticalMax,
        EndpointKind::Infinite => WeEndpointKind::Infinite,
        EndpointKind::Stopped => WeEndpointKind::Stopped,
    };
    WeEndpoint { kind, bounded: e.t_end.is_some() as i32, t_end: e.t_end.unwrap_or(f64::NAN) }
}

/// Classification of both ends as recorded on the profile.
///
/// # Safety
/// `profile` must be a live handle; `left` and `right` writable.
#[no_mangle]
pub unsafe extern "C" fn we_profile_endpoints(
    profile: *const WeProfile,
    left: *mut WeEndpoint,
    right: *mut WeEndpoint,
) -> WeStatus {
    guard(|| {
        let p = profile.as_ref().ok_or_else(|| null("profile"))?;
        if left.is_null() || right.is_null() {
            return Err(null("out"));
        }
        *left = endpoint(&p.inner.left_end);
        *right = endpoint(&p.inner.right_end);
        Ok(WeStatus::Ok)
    })
}

/// Verifies the profile against the reduced equations. Returns
/// `VerdictFail` when the check ran but did not pass; `out` is filled either way.
///
/// # Safety
/// `profile` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn we_verify(profile: *const WeProfile, tol: f64, out: *mut WeResiduals) -> WeStatus {
    guard(|| {
        let p = profile.as_ref().ok_or_else(|| null("profile"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(tol > 0.0) {
            return Err((WeStatus::InvalidArgument, "tol must be positive".into()));
        }
        let r = lib(verify(&p.inner, tol))?;
        let mu = lib(p.inner.mu_stats())?;
        let passed = r.verdict == Verdict::Pass;
        *out = WeResiduals {
            passed: passed as i32,
            r_second: r.r_second,
            r_compat: r.r_compat,
            r_first: r.r_first,
            r_second_norm: r.r_second_norm,
            r_compat_norm: r.r_compat_norm,
            r_first_norm: r.r_first_norm,
            mu_min: mu.min,
            mu_max: mu.max,
            mu_mean: mu.mean,
        };
        if !passed {
            set_error(format!("verification failed: {:?}", r.verdict));
        }
        Ok(if passed { WeStatus::Ok } else { WeStatus::VerdictFail })
    })
}

use std::ffi::CString;
use std::ptr;

use warp_einstein_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { we_last_error(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn catalog_sample_verifies() {
    let name = CString::new("spherical-cap").unwrap();
    let mut prof: *mut WeProfile = ptr::null_mut();
    let nan = f64::NAN;
    let s = unsafe { we_catalog_sample(name.as_ptr(), 4, 2, nan, nan, nan, 101, &mut prof) };
    assert_eq!(s, WeStatus::Ok);
    assert_eq!(unsafe { we_profile_len(prof) }, 101);

    let mut r = WeResiduals::default();
    assert_eq!(unsafe { we_verify(prof, 1e-9, &mut r) }, WeStatus::Ok);
    assert_eq!(r.passed, 1);
    assert!(r.r_second_norm < 1e-9);
    assert!((r.mu_max - r.mu_min).abs() < 1e-10);

    let mut pt = WePoint::default();
    assert_eq!(unsafe { we_profile_point(prof, 0, &mut pt) }, WeStatus::Ok);
    assert!(pt.t > 0.0 && pt.f > 0.0);
    assert_eq!(unsafe { we_profile_point(prof, 101, &mut pt) }, WeStatus::InvalidArgument);
    unsafe { we_profile_free(prof) };
}

#[test]
fn errors_carry_codes_and_messages() {
    let name = CString::new("no-such-family").unwrap();
    let mut prof: *mut WeProfile = ptr::null_mut();
    let nan = f64::NAN;
    let s = unsafe { we_catalog_sample(name.as_ptr(), 4, 2, nan, nan, nan, 11, &mut prof) };
    assert_eq!(s, WeStatus::InvalidArgument);
    assert!(prof.is_null());
    assert!(last_error().contains("no-such-family"));

    let s = unsafe { we_catalog_sample(ptr::null(), 4, 2, nan, nan, nan, 11, &mut prof) };
    assert_eq!(s, WeStatus::NullPointer);
    unsafe { we_profile_free(ptr::null_mut()) };
}

#[test]
fn integrate_reaches_critical_ends() {
    let p = WeParams { n: 3, m: 2, lambda: 4.0, k: 1.0 };
    let init = WeInitial { t: 0.0, u: 0.0, du: 1.0, f: 1.0, df: 0.0, has_ddf: 1, ddf: -1.0 };
    let mut prof: *mut WeProfile = ptr::null_mut();
    let s = unsafe { we_integrate(p, init, 0.0, f64::INFINITY, 1e-10, 1, 201, &mut prof) };
    assert_eq!(s, WeStatus::Ok, "{}", last_error());
    let mut l = WeEndpoint { kind: WeEndpointKind::Stopped, bounded: 0, t_end: 0.0 };
    let mut r = l;
    assert_eq!(unsafe { we_profile_endpoints(prof, &mut l, &mut r) }, WeStatus::Ok);
    assert_eq!(l.kind, WeEndpointKind::CriticalMax);
    assert_eq!(r.kind, WeEndpointKind::CriticalMin);
    assert!((r.t_end - std::f64::consts::PI).abs() < 1e-8);
    unsafe { we_profile_free(prof) };
}

#[test]
fn arrays_round_trip_and_fail_verdict() {
    let t: Vec<f64> = (0..60).map(|i| 0.5 + i as f64 * 0.05).collect();
    let u: Vec<f64> = t.iter().map(|t| t.cosh()).collect();
    let f: Vec<f64> = t.iter().map(|t| t.sinh()).collect();
    // Right profile, wrong λ.
    let p = WeParams { n: 4, m: 2, lambda: -4.0, k: -1.0 };
    let mut prof: *mut WeProfile = ptr::null_mut();
    let s = unsafe { we_profile_from_arrays(p, t.as_ptr(), u.as_ptr(), f.as_ptr(), t.len(), &mut prof) };
    assert_eq!(s, WeStatus::Ok, "{}", last_error());
    let mut r = WeResiduals::default();
    assert_eq!(unsafe { we_verify(prof, 1e-6, &mut r) }, WeStatus::VerdictFail);
    assert_eq!(r.passed, 0);
    unsafe { we_profile_free(prof) };
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/warp_einstein.h")).unwrap();
    for sym in [
        "we_last_error",
        "we_catalog_sample",
        "we_profile_from_arrays",
        "we_integrate",
        "we_profile_free",
        "we_profile_len",
        "we_profile_point",
        "we_profile_endpoints",
        "we_verify",
        "typedef struct WeProfile WeProfile",
    ] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Some(cc) = which_cc() else { return };
    let dir = tempfile_dir();
    let src = dir.join("probe.c");
    std::fs::write(
        &src,
        "#include \"warp_einstein.h\"\nint main(void) { WeProfile *p = 0; we_profile_free(p); return WE_STATUS_OK; }\n",
    )
    .unwrap();
    let status = std::process::Command::new(cc)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Option<&'static str> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| std::process::Command::new(c).arg("--version").output().is_ok())
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("we-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

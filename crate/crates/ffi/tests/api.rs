use std::ffi::{CStr, CString};
use std::ptr;

use stablerange_ffi::*;

fn build(json: &str) -> (SrStatus, *mut SrSolution) {
    let c = CString::new(json).unwrap();
    let mut h = ptr::null_mut();
    let s = unsafe { sr_solution_from_config_json(c.as_ptr(), &mut h) };
    (s, h)
}

fn last_error() -> String {
    let p = sr_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn eval_polynomial_family() {
    let (s, h) = build(r#"{"equation":"kz2d","family":"polynomial","params":{"alpha":"1"}}"#);
    assert_eq!(s, SrStatus::Ok);
    assert!(!unsafe { sr_solution_has_z(h) });
    for (x, y) in [(0.0, 0.0), (0.5, -1.0), (-2.0, 3.0)] {
        let mut v = f64::NAN;
        assert_eq!(unsafe { sr_solution_eval(h, 0.3, x, y, 0.0, &mut v) }, SrStatus::Ok);
        assert!((v - (x + y * y / 2.0)).abs() < 1e-14, "{v}");
    }
    unsafe { sr_solution_free(h) };
}

#[test]
fn verify_summary() {
    let (s, h) = build(r#"{"equation":"kz2d","family":"blowup","params":{"beta":"t","rho":"0"}}"#);
    assert_eq!(s, SrStatus::Ok);
    let mut sum = SrVerifySummary::default();
    assert_eq!(unsafe { sr_solution_verify(h, 200, &mut sum) }, SrStatus::Ok);
    assert_eq!(sum.samples, 200);
    assert!(sum.pass);
    assert!(sum.max_rel_residual <= 1e-10, "{sum:?}");
    assert_eq!(unsafe { sr_solution_verify(h, 0, ptr::null_mut()) }, SrStatus::InvalidInput);
    unsafe { sr_solution_free(h) };
}

#[test]
fn status_codes_follow_cli_classes() {
    let (s, h) = build("{");
    assert_eq!(s, SrStatus::InvalidInput);
    assert!(h.is_null());
    assert!(!last_error().is_empty());

    let (s, _) = build(r#"{"equation":"shortwave","family":"elliptic","k":1,"constants":{"iota":1}}"#);
    assert_eq!(s, SrStatus::Construction, "{}", last_error());

    let (s, h) = build(r#"{"equation":"kz2d","family":"blowup","params":{"beta":"t","rho":"0"}}"#);
    assert_eq!(s, SrStatus::Ok);
    let mut v = 0.0;
    assert_eq!(unsafe { sr_solution_eval(h, 0.0, 1.0, 0.0, 0.0, &mut v) }, SrStatus::Construction);
    unsafe { sr_solution_free(h) };
}

#[test]
fn null_arguments() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { sr_solution_from_config_json(ptr::null(), &mut h) }, SrStatus::NullPointer);
    let mut v = 0.0;
    assert_eq!(unsafe { sr_solution_eval(ptr::null(), 0.0, 0.0, 0.0, 0.0, &mut v) }, SrStatus::NullPointer);
    assert!(!unsafe { sr_solution_has_z(ptr::null()) });
    unsafe { sr_solution_free(ptr::null_mut()) };
    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { sr_solution_from_config_json(bad.as_ptr().cast(), &mut h) },
        SrStatus::Utf8
    );
}

#[test]
fn version_matches_package() {
    let v = unsafe { CStr::from_ptr(sr_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

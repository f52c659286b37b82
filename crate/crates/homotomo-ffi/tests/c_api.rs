use homotomo_ffi::*;
use std::ffi::{CStr, CString};
use std::f64::consts::PI;
use std::process::Command;
use std::ptr;

fn vacuum() -> *mut HtTomogram {
    let mut h = ptr::null_mut();
    let s = unsafe { ht_tomogram_gaussian(0.0, 0.0, 0.0, 0.0, 1.0, 0, 0, &mut h) };
    assert_eq!(s, HtStatus::Ok);
    assert!(!h.is_null());
    h
}

#[test]
fn vacuum_values_through_the_c_api() {
    let h = vacuum();
    unsafe {
        let (mut np, mut nq) = (0usize, 0usize);
        assert_eq!(ht_tomogram_dims(h, &mut np, &mut nq), HtStatus::Ok);
        assert!(np > 0 && nq > 0);

        let mut v = 0.0;
        assert_eq!(ht_tomogram_marginal(h, 0.3, 0.0, &mut v), HtStatus::Ok);
        assert!((v - 1.0 / PI.sqrt()).abs() < 1e-8);

        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(ht_fock_element(h, 0, 0, &mut re, &mut im), HtStatus::Ok);
        assert!((re - 1.0).abs() < 1e-6 && im.abs() < 1e-6);

        assert_eq!(ht_qfunction(h, 0.0, 0.0, &mut v), HtStatus::Ok);
        assert!((v - 1.0 / PI).abs() < 1e-6);

        assert_eq!(ht_wigner(h, 0.0, 0.0, &mut v), HtStatus::Ok);
        assert!((v - 1.0 / PI).abs() < 1e-3);

        assert_eq!(ht_moment(h, 1, 1, &mut re, &mut im), HtStatus::Ok);
        assert!(re.abs() < 1e-6 && im.abs() < 1e-6);

        let mut buf = vec![0.0; 2 * 9];
        assert_eq!(ht_density(h, 2, buf.as_mut_ptr(), 3), HtStatus::Domain);
        assert_eq!(ht_density(h, 2, buf.as_mut_ptr(), buf.len()), HtStatus::Ok);
        assert!((buf[0] - 1.0).abs() < 1e-6);
        assert!(buf[2..].iter().all(|x| x.abs() < 1e-6));

        ht_tomogram_free(h);
    }
}

#[test]
fn coherent_element_matches_closed_form() {
    let mut h = ptr::null_mut();
    // q̄ = √2 Re α, p̄ = √2 Im α at ħ = 1.
    let s = unsafe { ht_tomogram_gaussian(0.5 * 2f64.sqrt(), 0.0, 0.0, 0.0, 1.0, 0, 0, &mut h) };
    assert_eq!(s, HtStatus::Ok);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { ht_fock_element(h, 1, 0, &mut re, &mut im) }, HtStatus::Ok);
    assert!((re - 0.5 * (-0.25f64).exp()).abs() < 1e-6, "{re}");
    assert!(im.abs() < 1e-6);
    unsafe { ht_tomogram_free(h) };
}

#[test]
fn file_round_trip_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("vac.csv").to_str().unwrap()).unwrap();
    let h = vacuum();
    unsafe {
        assert_eq!(ht_tomogram_write(h, path.as_ptr()), HtStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(ht_tomogram_read(path.as_ptr(), &mut back), HtStatus::Ok);
        let (mut a, mut b) = (0.0, 0.0);
        ht_tomogram_marginal(h, 1.0, 0.4, &mut a);
        ht_tomogram_marginal(back, 1.0, 0.4, &mut b);
        assert_eq!(a, b);
        ht_tomogram_free(back);
        ht_tomogram_free(h);

        let missing = CString::new(dir.path().join("nope.csv").to_str().unwrap()).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(ht_tomogram_read(missing.as_ptr(), &mut out), HtStatus::Io);
        assert!(out.is_null());
        assert!(!CStr::from_ptr(ht_last_error()).to_bytes().is_empty());
    }
}

#[test]
fn pattern_values_at_origin() {
    for (rep, want) in [
        (HtRepresentation::Canonical, 2.0),
        (HtRepresentation::HermiteSeries, 2.0),
        (HtRepresentation::Symmetrized, 2.0),
    ] {
        let mut v = 0.0;
        assert_eq!(unsafe { ht_pattern_value(rep, 0, 0, 0.0, &mut v) }, HtStatus::Ok);
        assert!((v - want).abs() < 1e-10, "{rep:?}: {v}");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/homotomo.h");
    assert!(std::path::Path::new(header).exists());
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-x", "c", "-std=c99", header]).status() else {
        eprintln!("no C compiler; skipping header check");
        return;
    };
    assert!(status.success());
}

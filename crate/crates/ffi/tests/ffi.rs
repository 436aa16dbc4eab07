use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use cpt_frameness_ffi::*;

fn spin_zero(theta_c: f64, theta_pt: f64) -> *mut CptfRep {
    let mut rep = ptr::null_mut();
    let status = unsafe { cptf_rep_new(0, 1, 1, 1.0, true, false, theta_c, theta_pt, &mut rep) };
    assert_eq!(status, CptfStatus::Ok);
    assert!(!rep.is_null());
    rep
}

fn last_error() -> String {
    let p = cptf_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn spin_zero_cpt_is_antidiagonal() {
    let rep = spin_zero(0.0, 0.0);
    let n = unsafe { cptf_rep_dim(rep) };
    assert_eq!(n, 4);
    let mut buf = vec![f64::NAN; 2 * n * n];
    let status = unsafe { cptf_rep_operator(rep, CptfTransformation::CPT, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(status, CptfStatus::Ok);
    for i in 0..n {
        for j in 0..n {
            let expected = if i + j == n - 1 { 1.0 } else { 0.0 };
            assert_eq!((buf[2 * (i * n + j)], buf[2 * (i * n + j) + 1]), (expected, 0.0));
        }
    }
    let (mut plus, mut minus) = (0, 0);
    assert_eq!(
        unsafe { cptf_rep_sector_dims(rep, &mut plus, &mut minus) },
        CptfStatus::Ok
    );
    assert_eq!((plus, minus), (2, 2));
    unsafe { cptf_rep_free(rep) };
}

#[test]
fn small_buffer_and_null_handles() {
    let rep = spin_zero(0.0, 0.0);
    let mut buf = [0.0; 4];
    let status = unsafe { cptf_rep_operator(rep, CptfTransformation::C, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(status, CptfStatus::BufferTooSmall);
    assert!(last_error().contains("32"));
    unsafe { cptf_rep_free(rep) };

    assert_eq!(unsafe { cptf_rep_dim(ptr::null()) }, 0);
    let status = unsafe { cptf_rep_operator(ptr::null(), CptfTransformation::C, buf.as_mut_ptr(), 4) };
    assert_eq!(status, CptfStatus::NullPointer);
    unsafe { cptf_rep_free(ptr::null_mut()) };
}

#[test]
fn construction_errors() {
    let mut rep = ptr::null_mut();
    let status = unsafe { cptf_rep_new(0, 1, 1, -1.0, true, false, 0.0, 0.0, &mut rep) };
    assert_eq!(status, CptfStatus::Usage);
    assert!(rep.is_null());
    let status = unsafe { cptf_rep_new(0, 1, 0, 1.0, true, false, 0.0, 0.0, &mut rep) };
    assert_eq!(status, CptfStatus::Usage);
    let status = unsafe { cptf_rep_new(0, 1, 1, 1.0, true, false, 0.0, 0.0, ptr::null_mut()) };
    assert_eq!(status, CptfStatus::NullPointer);
}

#[test]
fn phased_cpt_blocks_sector_calls() {
    let rep = spin_zero(0.3, 0.0);
    let (mut plus, mut minus) = (0, 0);
    let status = unsafe { cptf_rep_sector_dims(rep, &mut plus, &mut minus) };
    assert_eq!(status, CptfStatus::PhaseNotStripped);
    unsafe { cptf_rep_free(rep) };
}

#[test]
fn resource_measures() {
    let mut bits = 0.0;
    assert_eq!(unsafe { cptf_alignment_rate(0.75, &mut bits) }, CptfStatus::Ok);
    assert!((bits - 2.0).abs() < 1e-12);
    assert_eq!(unsafe { cptf_alignment_rate(0.5, &mut bits) }, CptfStatus::Ok);
    assert_eq!(bits, f64::INFINITY);
    assert_eq!(unsafe { cptf_alignment_rate(1.5, &mut bits) }, CptfStatus::Usage);

    // |u,0,p> splits evenly across the sectors and is orthogonal to its image
    let rep = spin_zero(0.0, 0.0);
    let state = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let (mut q0, mut q1) = (0.0, 0.0);
    assert_eq!(
        unsafe { cptf_standard_form(rep, state.as_ptr(), 4, &mut q0, &mut q1) },
        CptfStatus::Ok
    );
    assert!((q0 - 0.5).abs() < 1e-15 && (q1 - 0.5).abs() < 1e-15);
    let mut p = 0.0;
    assert_eq!(
        unsafe { cptf_helstrom_success(rep, state.as_ptr(), 4, 2, &mut p) },
        CptfStatus::Ok
    );
    assert!((p - 1.0).abs() < 1e-12);
    assert_eq!(
        unsafe { cptf_helstrom_success(rep, state.as_ptr(), 3, 1, &mut p) },
        CptfStatus::DimensionMismatch
    );
    assert_eq!(
        unsafe { cptf_helstrom_success(rep, state.as_ptr(), 4, 9, &mut p) },
        CptfStatus::SizeCap
    );
    unsafe { cptf_rep_free(rep) };
}

#[test]
fn protocol_summary() {
    let mut s = CptfProtocolSummary::default();
    let status = unsafe {
        cptf_protocol_run(
            CptfEncoding::Dfs,
            CptfChannelMode::RandomUniform,
            200,
            3,
            f64::NAN,
            0,
            &mut s,
        )
    };
    assert_eq!(status, CptfStatus::Ok);
    assert_eq!(s.trials, 200);
    assert!(s.min_fidelity > 1.0 - 1e-12);
    assert!(s.guess_accuracy.is_nan());

    let status = unsafe {
        cptf_protocol_run(
            CptfEncoding::Naive,
            CptfChannelMode::RandomUniform,
            200,
            3,
            0.5,
            1,
            &mut s,
        )
    };
    assert_eq!(status, CptfStatus::Ok);
    assert_eq!(s.guess_accuracy, 1.0);
    assert!(s.min_fidelity > 1.0 - 1e-12);

    let status = unsafe {
        cptf_protocol_run(
            CptfEncoding::Naive,
            CptfChannelMode::FixedCpt,
            0,
            3,
            f64::NAN,
            0,
            &mut s,
        )
    };
    assert_eq!(status, CptfStatus::Usage);
}

#[test]
fn header_is_valid_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/cpt_frameness.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "cptf_rep_new",
        "cptf_rep_free",
        "cptf_last_error",
        "cptf_protocol_run",
        "typedef struct CptfRep CptfRep",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .status()
            .unwrap_or_else(|e| panic!("{compiler}: {e}"));
        assert!(status.success(), "{compiler} rejected the header");
    }
}

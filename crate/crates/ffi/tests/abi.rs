use std::ffi::CStr;
use std::ptr;

use hyperabsorb_ffi::*;

fn real(x: f64) -> HaComplex {
    HaComplex { re: x, im: 0.0 }
}

fn new_scenario(kind: HaKind, alpha: f64, gamma: f64, a: f64, c: f64) -> *mut HaScenario {
    let beta = (1.0 - alpha * alpha).sqrt();
    let delta = (1.0 - gamma * gamma).sqrt();
    let mut h = ptr::null_mut();
    let s = unsafe {
        ha_scenario_new(
            kind,
            real(alpha),
            real(beta),
            real(gamma),
            real(delta),
            a,
            c,
            &mut h,
        )
    };
    assert_eq!(s, HaStatus::Ok);
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ha_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

#[test]
fn evaluates_reference_scenario() {
    let h = new_scenario(HaKind::Entangled, 0.1, 0.1, 0.9, 0.9);
    let mut r = std::mem::MaybeUninit::<HaReport>::uninit();
    let s = unsafe { ha_scenario_evaluate(h, 0.0, r.as_mut_ptr()) };
    assert_eq!(s, HaStatus::Ok);
    let r = unsafe { r.assume_init() };
    assert!((r.p_double_indistinguishable - 2.0e-4).abs() < 1e-15);
    assert!((r.p_double + r.p_a_only + r.p_b_only + r.p_none - 1.0).abs() < 1e-12);
    assert!((r.entropy_final - 1.0).abs() < 1e-12);
    assert!(r.has_lambda && r.lambda_verdict);
    assert_eq!(r.classification, HaClassification::NonProductHyperentangled);
    unsafe { ha_scenario_free(h) };
}

#[test]
fn gaussian_recoil_zero_kick_is_single_dof() {
    let h = new_scenario(HaKind::Entangled, 0.1, 0.1, 0.5, 0.5);
    assert_eq!(
        unsafe { ha_scenario_set_gaussian_recoil(h, 1.0, 0.0) },
        HaStatus::Ok
    );
    let mut r = std::mem::MaybeUninit::<HaReport>::uninit();
    assert_eq!(
        unsafe { ha_scenario_evaluate(h, 0.0, r.as_mut_ptr()) },
        HaStatus::Ok
    );
    let r = unsafe { r.assume_init() };
    assert_eq!(r.classification, HaClassification::SingleDofEntangled);
    assert_eq!(
        unsafe { ha_scenario_set_gaussian_recoil(h, -1.0, 0.0) },
        HaStatus::InvalidArgument
    );
    assert!(last_error().contains("sigma_x"));
    unsafe { ha_scenario_free(h) };
}

#[test]
fn product_and_mixture_have_no_lambda() {
    for kind in [HaKind::Product, HaKind::Mixture] {
        let h = new_scenario(kind, 0.3, 0.2, 0.7, 0.4);
        let mut r = std::mem::MaybeUninit::<HaReport>::uninit();
        assert_eq!(
            unsafe { ha_scenario_evaluate(h, 1e-8, r.as_mut_ptr()) },
            HaStatus::Ok
        );
        let r = unsafe { r.assume_init() };
        assert!(!r.has_lambda && r.k_value.is_nan());
        assert_eq!(r.classification, HaClassification::Separable);
        unsafe { ha_scenario_free(h) };
    }
}

#[test]
fn invalid_inputs_report_status_and_message() {
    let mut h = ptr::null_mut();
    let s = unsafe {
        ha_scenario_new(
            HaKind::Entangled,
            real(0.1),
            real(0.9),
            real(0.1),
            real(0.99),
            0.9,
            0.9,
            &mut h,
        )
    };
    assert_eq!(s, HaStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(!last_error().is_empty());

    let s = unsafe {
        ha_scenario_new(
            HaKind::Entangled,
            real(1.0),
            real(0.0),
            real(1.0),
            real(0.0),
            2.0,
            0.9,
            &mut h,
        )
    };
    assert_eq!(s, HaStatus::InvalidArgument);

    let mut r = std::mem::MaybeUninit::<HaReport>::uninit();
    assert_eq!(
        unsafe { ha_scenario_evaluate(ptr::null(), 0.0, r.as_mut_ptr()) },
        HaStatus::NullPointer
    );
    assert_eq!(last_error(), "scenario is null");

    let h = new_scenario(HaKind::Entangled, 0.1, 0.1, 0.9, 0.9);
    assert_eq!(
        unsafe { ha_scenario_evaluate(h, 0.0, ptr::null_mut()) },
        HaStatus::NullPointer
    );
    assert_eq!(
        unsafe { ha_scenario_evaluate(h, 1.5, r.as_mut_ptr()) },
        HaStatus::InvalidArgument
    );
    unsafe { ha_scenario_free(h) };
    unsafe { ha_scenario_free(ptr::null_mut()) };
}

#[test]
fn degenerate_spectrum_is_numerical() {
    let h = new_scenario(HaKind::Entangled, 1.0, 1.0, 0.0, 1.0);
    let mut r = std::mem::MaybeUninit::<HaReport>::uninit();
    assert_eq!(
        unsafe { ha_scenario_evaluate(h, 0.0, r.as_mut_ptr()) },
        HaStatus::Numerical
    );
    unsafe { ha_scenario_free(h) };
}

#[test]
fn scalar_helpers() {
    let mut out = 0.0;
    let p = [0.25, 0.75];
    assert_eq!(
        unsafe { ha_entropy_bits(p.as_ptr(), p.len(), &mut out) },
        HaStatus::Ok
    );
    assert!((out - 0.8112781244591328).abs() < 1e-15);
    let bad = [0.5, 0.6];
    assert_eq!(
        unsafe { ha_entropy_bits(bad.as_ptr(), bad.len(), &mut out) },
        HaStatus::InvalidArgument
    );

    assert_eq!(
        unsafe { ha_gaussian_recoil_overlap(1.0, 1.0, &mut out) },
        HaStatus::Ok
    );
    assert!((out - 0.6065306597126334).abs() < 1e-15);

    let (mut a, mut b) = (0.0, 0.0);
    assert_eq!(unsafe { ha_decompose_overlap(0.6, &mut a, &mut b) }, HaStatus::Ok);
    assert!((a - 0.6).abs() < 1e-15 && (b - 0.8).abs() < 1e-15);
    assert_eq!(
        unsafe { ha_decompose_overlap(1.5, &mut a, &mut b) },
        HaStatus::InvalidArgument
    );
}

#[test]
fn check_run_passes_everything() {
    let (mut passed, mut total) = (0u32, 0u32);
    assert_eq!(unsafe { ha_check_run(&mut passed, &mut total) }, HaStatus::Ok);
    assert_eq!((passed, total), (8, 8));
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/hyperabsorb.h");
    for name in [
        "ha_scenario_new",
        "ha_scenario_set_gaussian_recoil",
        "ha_scenario_free",
        "ha_scenario_evaluate",
        "ha_entropy_bits",
        "ha_gaussian_recoil_overlap",
        "ha_decompose_overlap",
        "ha_check_run",
        "ha_last_error",
        "ha_version",
        "typedef struct HaScenario HaScenario",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

//! C ABI over the `hyperabsorb` library.
//!
//! Scenarios live behind an opaque [`HaScenario`] handle created with
//! [`ha_scenario_new`] and released with [`ha_scenario_free`]. Every
//! fallible function returns an [`HaStatus`]; on failure a message for the
//! calling thread is available from [`ha_last_error`]. Panics never cross
//! the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hyperabsorb::absorption::{AbsorptionAmplitudes, InitialStateKind, Scenario};
use hyperabsorb::check::{run_checks, Fault};
use hyperabsorb::entanglement::{entropy_bits, Classification, PRODUCT_TOLERANCE};
use hyperabsorb::overlap::{decompose_overlap, gaussian_recoil_overlap, GaussianRecoilModel, RecoilOverlaps};
use hyperabsorb::report::{evaluate, ScenarioReport};
use hyperabsorb::Error;
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// A numerical guard tripped: zero norm, degenerate spectrum or an
    /// unnormalized state.
    Numerical = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HaKind {
    Entangled = 0,
    Mixture = 1,
    Product = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HaClassification {
    Separable = 0,
    SingleDofEntangled = 1,
    ProductFormHyperentangled = 2,
    NonProductHyperentangled = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HaComplex {
    pub re: f64,
    pub im: f64,
}

/// Flat evaluation result. The Λ fields are meaningful only when
/// `has_lambda` is set (entangled preparation, real amplitudes).
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HaReport {
    pub p_double: f64,
    pub p_a_only: f64,
    pub p_b_only: f64,
    pub p_none: f64,
    pub p_double_indistinguishable: f64,
    pub entropy_initial: f64,
    pub entropy_final: f64,
    pub has_lambda: bool,
    pub entropy_final_lambda: f64,
    pub k_value: f64,
    pub lambda_verdict: bool,
    pub spatial_internal_product: bool,
    pub classification: HaClassification,
    pub linear_regime_warning: bool,
}

/// Opaque scenario handle.
pub struct HaScenario {
    inner: Scenario,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HaStatus {
    match e {
        Error::ZeroNorm(_) | Error::NotNormalized(_) | Error::DegenerateSpectrum(_) => HaStatus::Numerical,
        _ => HaStatus::InvalidArgument,
    }
}

fn guard<F: FnOnce() -> Result<(), (HaStatus, String)>>(f: F) -> HaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HaStatus::Ok,
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            HaStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (HaStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (HaStatus, String) {
    (HaStatus::NullPointer, format!("{name} is null"))
}

impl From<HaKind> for InitialStateKind {
    fn from(k: HaKind) -> Self {
        match k {
            HaKind::Entangled => InitialStateKind::Entangled,
            HaKind::Mixture => InitialStateKind::EqualMixture,
            HaKind::Product => InitialStateKind::Product,
        }
    }
}

impl From<Classification> for HaClassification {
    fn from(c: Classification) -> Self {
        match c {
            Classification::Separable => HaClassification::Separable,
            Classification::SingleDofEntangled => HaClassification::SingleDofEntangled,
            Classification::ProductFormHyperentangled => HaClassification::ProductFormHyperentangled,
            Classification::NonProductHyperentangled => HaClassification::NonProductHyperentangled,
        }
    }
}

impl From<&ScenarioReport> for HaReport {
    fn from(r: &ScenarioReport) -> Self {
        HaReport {
            p_double: r.p_double,
            p_a_only: r.p_a_only,
            p_b_only: r.p_b_only,
            p_none: r.p_none,
            p_double_indistinguishable: r.p_double_indistinguishable,
            entropy_initial: r.entropy_initial,
            entropy_final: r.entropy_final,
            has_lambda: r.k_value.is_some(),
            entropy_final_lambda: r.entropy_final_lambda.unwrap_or(f64::NAN),
            k_value: r.k_value.unwrap_or(f64::NAN),
            lambda_verdict: r.lambda_verdict.unwrap_or(false),
            spatial_internal_product: r.spatial_internal_product,
            classification: r.classification.into(),
            linear_regime_warning: r.linear_regime_warning,
        }
    }
}

fn c(z: HaComplex) -> Complex64 {
    Complex64::new(z.re, z.im)
}

/// Creates a scenario with overlaps `⟨φ|φ̄⟩ = a` and `⟨ϕ|ϕ̄⟩ = c`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn ha_scenario_new(
    kind: HaKind,
    alpha: HaComplex,
    beta: HaComplex,
    gamma: HaComplex,
    delta: HaComplex,
    overlap_a: f64,
    overlap_c: f64,
    out: *mut *mut HaScenario,
) -> HaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let amplitudes = AbsorptionAmplitudes::new(c(alpha), c(beta), c(gamma), c(delta)).map_err(lib_err)?;
        let overlaps = RecoilOverlaps::from_overlaps(overlap_a, overlap_c).map_err(lib_err)?;
        let handle = Box::new(HaScenario {
            inner: Scenario {
                kind: kind.into(),
                amplitudes,
                overlaps,
            },
        });
        unsafe { *out = Box::into_raw(handle) };
        Ok(())
    })
}

/// Replaces the overlaps of a scenario with the Gaussian recoil model
/// shared by both atoms.
///
/// # Safety
/// `scenario` must be a live handle from [`ha_scenario_new`].
#[no_mangle]
pub unsafe extern "C" fn ha_scenario_set_gaussian_recoil(
    scenario: *mut HaScenario,
    sigma_x: f64,
    k_recoil: f64,
) -> HaStatus {
    guard(|| {
        let s = unsafe { scenario.as_mut() }.ok_or_else(|| null("scenario"))?;
        let model = GaussianRecoilModel::new(sigma_x, k_recoil).map_err(lib_err)?;
        let a = gaussian_recoil_overlap(&model);
        s.inner.overlaps = RecoilOverlaps::from_overlaps(a, a).map_err(lib_err)?;
        Ok(())
    })
}

/// Releases a handle. Null is accepted and ignored.
///
/// # Safety
/// `scenario` must be null or a live handle not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ha_scenario_free(scenario: *mut HaScenario) {
    if !scenario.is_null() {
        drop(unsafe { Box::from_raw(scenario) });
    }
}

/// Evaluates a scenario. A non-positive `product_tolerance` selects the
/// default.
///
/// # Safety
/// `scenario` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ha_scenario_evaluate(
    scenario: *const HaScenario,
    product_tolerance: f64,
    out: *mut HaReport,
) -> HaStatus {
    guard(|| {
        let s = unsafe { scenario.as_ref() }.ok_or_else(|| null("scenario"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let tol = if product_tolerance > 0.0 {
            product_tolerance
        } else {
            PRODUCT_TOLERANCE
        };
        if tol >= 1.0 || tol.is_nan() {
            return Err((
                HaStatus::InvalidArgument,
                format!("product tolerance must be in (0, 1), got {tol}"),
            ));
        }
        let report = evaluate(&s.inner, tol).map_err(lib_err)?;
        unsafe { *out = HaReport::from(&report) };
        Ok(())
    })
}

/// Base-2 Shannon entropy of `n` probabilities.
///
/// # Safety
/// `probabilities` must point to `n` readable doubles; `out` must be valid
/// for one write.
#[no_mangle]
pub unsafe extern "C" fn ha_entropy_bits(probabilities: *const f64, n: usize, out: *mut f64) -> HaStatus {
    guard(|| {
        if probabilities.is_null() && n > 0 {
            return Err(null("probabilities"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let p = if n == 0 {
            &[][..]
        } else {
            unsafe { std::slice::from_raw_parts(probabilities, n) }
        };
        let s = entropy_bits(p).map_err(lib_err)?;
        unsafe { *out = s };
        Ok(())
    })
}

/// `exp(−k²σ²/2)`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn ha_gaussian_recoil_overlap(sigma_x: f64, k_recoil: f64, out: *mut f64) -> HaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let model = GaussianRecoilModel::new(sigma_x, k_recoil).map_err(lib_err)?;
        unsafe { *out = gaussian_recoil_overlap(&model) };
        Ok(())
    })
}

/// Splits an overlap `s` into `(a, b) = (s, √(1 − s²))`.
///
/// # Safety
/// `a` and `b` must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn ha_decompose_overlap(s: f64, a: *mut f64, b: *mut f64) -> HaStatus {
    guard(|| {
        if a.is_null() || b.is_null() {
            return Err(null("output"));
        }
        let (x, y) = decompose_overlap(s).map_err(lib_err)?;
        unsafe {
            *a = x;
            *b = y;
        }
        Ok(())
    })
}

/// Runs the built-in reproduction checks. `passed` and `total` receive
/// the counts; the status is `Ok` even when some checks fail.
///
/// # Safety
/// `passed` and `total` must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn ha_check_run(passed: *mut u32, total: *mut u32) -> HaStatus {
    guard(|| {
        if passed.is_null() || total.is_null() {
            return Err(null("output"));
        }
        let outcomes = run_checks(Fault::None);
        unsafe {
            *passed = outcomes.iter().filter(|o| o.passed).count() as u32;
            *total = outcomes.len() as u32;
        }
        Ok(())
    })
}

/// Message for the last failure on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ha_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ha_version() -> *const c_char {
    const VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version contains NUL"),
        };
    VERSION.as_ptr()
}

//! C ABI over the cyclemix library: opaque model handles, integer status
//! codes, flat output buffers, and a thread-local last-error message.
//!
//! Every function returns a status code: [`CMX_OK`] on success,
//! [`CMX_INVALID`] for domain errors or null pointers, [`CMX_CAP_EXCEEDED`]
//! when state-space enumeration would exceed the configured cap, and
//! [`CMX_NUMERICAL`] when a numerical guard trips. On failure,
//! [`cmx_last_error_message`] describes the problem.

#![deny(missing_docs)]

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::slice;

use cyclemix::kernels::{audit_assumptions, simulate};
use cyclemix::mixing::exact_tv_curve;
use cyclemix::models::{build_asep, build_constant, build_dimer};
use cyclemix::report::write_spectrum;
use cyclemix::rng::stream_rng;
use cyclemix::{full_spectrum, gap, ChainModel, Error, StepDistribution};

/// Success.
pub const CMX_OK: i32 = 0;
/// Invalid argument, null pointer, or i/o failure.
pub const CMX_INVALID: i32 = 2;
/// State-space enumeration would exceed the cap.
pub const CMX_CAP_EXCEEDED: i32 = 3;
/// A numerical guard tripped.
pub const CMX_NUMERICAL: i32 = 4;

/// Opaque handle to a built chain.
pub struct CmxModel {
    inner: ChainModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> =
        RefCell::new(CString::new("").expect("empty string has no NUL"));
}

fn set_message(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NUL bytes stripped");
    });
}

fn fail(error: &Error) -> i32 {
    set_message(&error.to_string());
    error.exit_code()
}

fn fail_invalid(message: &str) -> i32 {
    set_message(message);
    CMX_INVALID
}

fn succeed() -> i32 {
    set_message("");
    CMX_OK
}

fn guarded<F: FnOnce() -> i32>(body: F) -> i32 {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(code) => code,
        Err(_) => {
            set_message("internal panic");
            CMX_NUMERICAL
        }
    }
}

/// Message for the most recent failing call on this thread; empty after a
/// success. The pointer stays valid until the next call into this library
/// from the same thread.
#[no_mangle]
pub extern "C" fn cmx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cmx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

fn deliver(out: *mut *mut CmxModel, model: ChainModel) -> i32 {
    if out.is_null() {
        return fail_invalid("output handle pointer is null");
    }
    unsafe {
        *out = Box::into_raw(Box::new(CmxModel { inner: model }));
    }
    succeed()
}

/// Build a chain for a caller-supplied step law given as parallel arrays of
/// step sizes and weights.
///
/// # Safety
/// `steps` and `weights` must point to `len` readable elements; `out` must
/// be a valid location to store the new handle. The handle must be released
/// with [`cmx_model_free`].
#[no_mangle]
pub unsafe extern "C" fn cmx_model_new_constant(
    n: u32,
    k: u32,
    steps: *const i64,
    weights: *const f64,
    len: usize,
    out: *mut *mut CmxModel,
) -> i32 {
    guarded(|| {
        if steps.is_null() || weights.is_null() {
            return fail_invalid("step-law array pointer is null");
        }
        let steps = unsafe { slice::from_raw_parts(steps, len) };
        let weights = unsafe { slice::from_raw_parts(weights, len) };
        let mut law = BTreeMap::new();
        for (&ell, &w) in steps.iter().zip(weights) {
            if law.insert(ell, w).is_some() {
                return fail_invalid(&format!("step {ell} appears twice in the law"));
            }
        }
        let law = match StepDistribution::new(law) {
            Ok(law) => law,
            Err(e) => return fail(&e),
        };
        match build_constant(n, k, &law) {
            Ok(preset) => deliver(out, preset.model),
            Err(e) => fail(&e),
        }
    })
}

/// Build the conditioned ±1 walk chain with clockwise rate `alpha` and
/// anticlockwise rate `beta`.
///
/// # Safety
/// `out` must be a valid location to store the new handle.
#[no_mangle]
pub unsafe extern "C" fn cmx_model_new_asep(
    n: u32,
    k: u32,
    alpha: f64,
    beta: f64,
    out: *mut *mut CmxModel,
) -> i32 {
    guarded(|| match build_asep(n, k, alpha, beta) {
        Ok(preset) => deliver(out, preset.model),
        Err(e) => fail(&e),
    })
}

/// Build the dimer slice chain with edge weights `a1`, `a2`.
///
/// # Safety
/// `out` must be a valid location to store the new handle.
#[no_mangle]
pub unsafe extern "C" fn cmx_model_new_dimer(
    n: u32,
    k: u32,
    a1: f64,
    a2: f64,
    out: *mut *mut CmxModel,
) -> i32 {
    guarded(|| match build_dimer(n, k, a1, a2) {
        Ok(preset) => deliver(out, preset.model),
        Err(e) => fail(&e),
    })
}

/// Release a handle created by one of the `cmx_model_new_*` functions.
/// Passing null is a no-op.
///
/// # Safety
/// `model` must be a handle returned by this library that has not already
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn cmx_model_free(model: *mut CmxModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Circle size of the chain; 0 when the handle is null.
///
/// # Safety
/// `model` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn cmx_model_n(model: *const CmxModel) -> u32 {
    if model.is_null() {
        return 0;
    }
    unsafe { &*model }.inner.n()
}

/// Particle count of the chain; 0 when the handle is null.
///
/// # Safety
/// `model` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn cmx_model_k(model: *const CmxModel) -> u32 {
    if model.is_null() {
        return 0;
    }
    unsafe { &*model }.inner.k()
}

/// Spectral gap of the chain: writes the exact value 1 − |λ_{I₁}| and its
/// first-order sine formula.
///
/// # Safety
/// `model` must be a live handle; `gamma_exact` and `gamma_formula` must be
/// valid writable locations.
#[no_mangle]
pub unsafe extern "C" fn cmx_gap(
    model: *const CmxModel,
    gamma_exact: *mut f64,
    gamma_formula: *mut f64,
) -> i32 {
    guarded(|| {
        if model.is_null() || gamma_exact.is_null() || gamma_formula.is_null() {
            return fail_invalid("null pointer passed to cmx_gap");
        }
        match gap(&unsafe { &*model }.inner) {
            Ok(report) => {
                unsafe {
                    *gamma_exact = report.gamma_exact;
                    *gamma_formula = report.gamma_formula;
                }
                succeed()
            }
            Err(e) => fail(&e),
        }
    })
}

/// Exact total-variation mixing curve from the ground start: writes
/// `t_max + 1` values (times 0..=t_max) into `tv_out`.
///
/// # Safety
/// `model` must be a live handle; `tv_out` must point to at least
/// `t_max + 1` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cmx_mixing_curve(
    model: *const CmxModel,
    t_max: u64,
    tv_out: *mut f64,
) -> i32 {
    guarded(|| {
        if model.is_null() || tv_out.is_null() {
            return fail_invalid("null pointer passed to cmx_mixing_curve");
        }
        let inner = &unsafe { &*model }.inner;
        match exact_tv_curve(inner, t_max, &inner.ground()) {
            Ok(curve) => {
                let out = unsafe { slice::from_raw_parts_mut(tv_out, t_max as usize + 1) };
                out.copy_from_slice(&curve.tv);
                succeed()
            }
            Err(e) => fail(&e),
        }
    })
}

/// Simulate `steps` transitions from the ground start under a fixed seed:
/// writes `(steps + 1) * k` positions into `positions_out`, row-major with
/// one configuration (largest position first) per time.
///
/// # Safety
/// `model` must be a live handle; `positions_out` must point to at least
/// `(steps + 1) * k` writable u32 values.
#[no_mangle]
pub unsafe extern "C" fn cmx_sample_trajectory(
    model: *const CmxModel,
    seed: u64,
    steps: u64,
    positions_out: *mut u32,
) -> i32 {
    guarded(|| {
        if model.is_null() || positions_out.is_null() {
            return fail_invalid("null pointer passed to cmx_sample_trajectory");
        }
        let inner = &unsafe { &*model }.inner;
        let k = inner.k() as usize;
        let mut rng = stream_rng(seed, 0);
        match simulate(&mut rng, inner, &inner.ground(), steps) {
            Ok(trajectory) => {
                let out = unsafe {
                    slice::from_raw_parts_mut(positions_out, (steps as usize + 1) * k)
                };
                for (t, config) in trajectory.iter().enumerate() {
                    out[t * k..(t + 1) * k].copy_from_slice(config.positions());
                }
                succeed()
            }
            Err(e) => fail(&e),
        }
    })
}

/// Compute the per-orbit spectrum and write it as a checksummed CSV (plus a
/// JSON sidecar) at `path`.
///
/// # Safety
/// `model` must be a live handle; `path` must be a NUL-terminated UTF-8
/// string.
#[no_mangle]
pub unsafe extern "C" fn cmx_spectrum_write_csv(
    model: *const CmxModel,
    path: *const c_char,
) -> i32 {
    guarded(|| {
        if model.is_null() || path.is_null() {
            return fail_invalid("null pointer passed to cmx_spectrum_write_csv");
        }
        let path = match unsafe { CStr::from_ptr(path) }.to_str() {
            Ok(text) => PathBuf::from(text),
            Err(_) => return fail_invalid("path is not valid UTF-8"),
        };
        let inner = &unsafe { &*model }.inner;
        let entries = match full_spectrum(inner) {
            Ok(entries) => entries,
            Err(e) => return fail(&e),
        };
        match write_spectrum(&path, inner, &entries) {
            Ok(_) => succeed(),
            Err(e) => fail(&e),
        }
    })
}

/// Audit the standing assumptions of the chain's step law and return the
/// result as a JSON string. The string must be released with
/// [`cmx_string_free`].
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid location to store
/// the new string.
#[no_mangle]
pub unsafe extern "C" fn cmx_audit_json(model: *const CmxModel, out: *mut *mut c_char) -> i32 {
    guarded(|| {
        if model.is_null() || out.is_null() {
            return fail_invalid("null pointer passed to cmx_audit_json");
        }
        let inner = &unsafe { &*model }.inner;
        let audit = audit_assumptions(inner.p(), inner.n(), inner.k());
        let json = match serde_json::to_string_pretty(&audit) {
            Ok(text) => text,
            Err(e) => return fail_invalid(&format!("serialization failed: {e}")),
        };
        match CString::new(json) {
            Ok(text) => {
                unsafe { *out = text.into_raw() };
                succeed()
            }
            Err(_) => fail_invalid("report contained a NUL byte"),
        }
    })
}

/// Release a string returned by [`cmx_audit_json`]. Passing null is a
/// no-op.
///
/// # Safety
/// `text` must be a string returned by this library that has not already
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn cmx_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(unsafe { CString::from_raw(text) });
    }
}

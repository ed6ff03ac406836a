//! C ABI for the gradedlie engine.
//!
//! Conventions:
//! - Opaque handles: [`GlParams`] is created by `gl_params_new` and released
//!   with `gl_params_free`.
//! - Every function returns a [`GlStatus`]; results are JSON strings written
//!   through an out-pointer and released with `gl_string_free`. The JSON
//!   matches the CLI's `--format json` output, with every number an exact
//!   rational string.
//! - Status codes mirror the CLI exit codes: `Ok` = all checks passed,
//!   `CheckFailed` = a mathematical check failed, `InvalidInput` = bad
//!   parameters or spec text.
//!
//! The header `include/gradedlie.h` is generated by cbindgen at build time.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, UnwindSafe};
use std::ptr;

use gradedlie::algebra::Params;
use gradedlie::cli::{
    cmd_aut_factor, cmd_aut_verify, cmd_classify, cmd_jacobi, cmd_report, default_grid,
    parse_grid_file, CmdOutcome, OutputFormat, RunConfig,
};
use gradedlie::exactlin::Scalar;
use gradedlie::rng::DEFAULT_SEED;

/// Status code of every C API call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GlStatus {
    /// Call succeeded and all mathematical checks passed.
    Ok = 0,
    /// Call ran but a mathematical check failed.
    CheckFailed = 1,
    /// Invalid parameters or unparseable input.
    InvalidInput = 2,
    /// A required pointer was null.
    NullPointer = 3,
    /// Internal panic; should not happen.
    Internal = 4,
}

/// Opaque validated parameter pair (lambda, mu).
pub struct GlParams {
    inner: Params,
    lambda: Scalar,
    mu: Scalar,
}

fn guard<F: FnOnce() -> GlStatus + UnwindSafe>(f: F) -> GlStatus {
    catch_unwind(f).unwrap_or(GlStatus::Internal)
}

/// Reads a UTF-8 C string; None on null or invalid UTF-8.
unsafe fn read_str<'a>(s: *const c_char) -> Option<&'a str> {
    if s.is_null() {
        return None;
    }
    unsafe { CStr::from_ptr(s) }.to_str().ok()
}

fn write_string(out: *mut *mut c_char, text: &str) {
    if out.is_null() {
        return;
    }
    let c = CString::new(text.replace('\0', "")).expect("NUL-free by construction");
    unsafe { *out = c.into_raw() };
}

fn status_of(outcome: &CmdOutcome) -> GlStatus {
    match outcome.status {
        0 => GlStatus::Ok,
        1 => GlStatus::CheckFailed,
        _ => GlStatus::InvalidInput,
    }
}

fn emit(outcome: CmdOutcome, out_json: *mut *mut c_char) -> GlStatus {
    let status = status_of(&outcome);
    let text = if outcome.stdout.is_empty() {
        outcome.stderr
    } else {
        outcome.stdout
    };
    write_string(out_json, &text);
    status
}

fn config_for(p: &GlParams, window: i64, seed: u64) -> RunConfig {
    let mut cfg = RunConfig::new(p.lambda.clone(), p.mu.clone());
    cfg.window_radius = window;
    cfg.seed = seed;
    cfg.format = OutputFormat::Json;
    cfg
}

/// Validates (lambda, mu), both exact rational strings like "-2" or "1/3".
/// On success writes an owned handle to `out`; free with `gl_params_free`.
///
/// # Safety
/// `lambda` and `mu` must be valid NUL-terminated strings; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gl_params_new(
    lambda: *const c_char,
    mu: *const c_char,
    out: *mut *mut GlParams,
) -> GlStatus {
    guard(|| {
        if out.is_null() {
            return GlStatus::NullPointer;
        }
        unsafe { *out = ptr::null_mut() };
        let (Some(lambda), Some(mu)) = (unsafe { read_str(lambda) }, unsafe { read_str(mu) })
        else {
            return GlStatus::NullPointer;
        };
        let (Ok(lambda), Ok(mu)) = (Scalar::parse(lambda), Scalar::parse(mu)) else {
            return GlStatus::InvalidInput;
        };
        match gradedlie::algebra::validate_params(lambda.clone(), mu.clone()) {
            Ok(params) => {
                let handle = Box::new(GlParams {
                    inner: params,
                    lambda,
                    mu,
                });
                unsafe { *out = Box::into_raw(handle) };
                GlStatus::Ok
            }
            Err(_) => GlStatus::InvalidInput,
        }
    })
}

/// Releases a handle from `gl_params_new`. Null is a no-op.
///
/// # Safety
/// `p` must be null or a pointer previously returned by `gl_params_new`.
#[no_mangle]
pub unsafe extern "C" fn gl_params_free(p: *mut GlParams) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Writes the classification case name ("generic_mu", ...) to `out_name`.
///
/// # Safety
/// `p` must be a live handle; `out_name` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gl_params_case(
    p: *const GlParams,
    out_name: *mut *mut c_char,
) -> GlStatus {
    guard(|| {
        let Some(p) = (unsafe { p.as_ref() }) else {
            return GlStatus::NullPointer;
        };
        write_string(out_name, p.inner.case().name());
        GlStatus::Ok
    })
}

/// Exhaustive Jacobi verification on the window; JSON report to `out_json`.
///
/// # Safety
/// `p` must be a live handle; `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gl_jacobi_check(
    p: *const GlParams,
    window: i64,
    out_json: *mut *mut c_char,
) -> GlStatus {
    guard(|| {
        let Some(p) = (unsafe { p.as_ref() }) else {
            return GlStatus::NullPointer;
        };
        emit(cmd_jacobi(&config_for(p, window, DEFAULT_SEED)), out_json)
    })
}

/// Degree-0 classification report as JSON; `Ok` iff it matches the theorems.
///
/// # Safety
/// `p` must be a live handle; `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gl_classify(
    p: *const GlParams,
    window: i64,
    out_json: *mut *mut c_char,
) -> GlStatus {
    guard(|| {
        let Some(p) = (unsafe { p.as_ref() }) else {
            return GlStatus::NullPointer;
        };
        emit(cmd_classify(&config_for(p, window, DEFAULT_SEED)), out_json)
    })
}

/// Grid classification report. `grid_text` uses the CLI grid file format
/// (one `lambda mu` pair per line); pass null for the default grid.
///
/// # Safety
/// `out_json` must be a valid pointer; `grid_text` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn gl_report(
    grid_text: *const c_char,
    window: i64,
    seed: u64,
    out_json: *mut *mut c_char,
) -> GlStatus {
    guard(|| {
        let grid = if grid_text.is_null() {
            default_grid()
        } else {
            let Some(text) = (unsafe { read_str(grid_text) }) else {
                return GlStatus::NullPointer;
            };
            match parse_grid_file(text) {
                Ok(g) => g,
                Err(_) => return GlStatus::InvalidInput,
            }
        };
        let mut cfg = RunConfig::new(Scalar::from_int(3), Scalar::new(1, 3));
        cfg.window_radius = window;
        cfg.seed = seed;
        cfg.format = OutputFormat::Json;
        emit(cmd_report(&grid, &cfg), out_json)
    })
}

/// Verifies an automorphism spec (CLI spec syntax: constructor lines or an
/// `images` table). JSON report to `out_json`.
///
/// # Safety
/// `p` must be a live handle; `spec` NUL-terminated; `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn gl_aut_verify(
    p: *const GlParams,
    window: i64,
    spec: *const c_char,
    seed: u64,
    out_json: *mut *mut c_char,
) -> GlStatus {
    guard(|| {
        let Some(p) = (unsafe { p.as_ref() }) else {
            return GlStatus::NullPointer;
        };
        let Some(spec) = (unsafe { read_str(spec) }) else {
            return GlStatus::NullPointer;
        };
        emit(cmd_aut_verify(&config_for(p, window, seed), spec), out_json)
    })
}

/// Factors an automorphism spec through the classified families; JSON
/// factorization data to `out_json`.
///
/// # Safety
/// `p` must be a live handle; `spec` NUL-terminated; `out_json` valid.
#[no_mangle]
pub unsafe extern "C" fn gl_aut_factor(
    p: *const GlParams,
    window: i64,
    spec: *const c_char,
    out_json: *mut *mut c_char,
) -> GlStatus {
    guard(|| {
        let Some(p) = (unsafe { p.as_ref() }) else {
            return GlStatus::NullPointer;
        };
        let Some(spec) = (unsafe { read_str(spec) }) else {
            return GlStatus::NullPointer;
        };
        emit(
            cmd_aut_factor(&config_for(p, window, DEFAULT_SEED), spec),
            out_json,
        )
    })
}

/// Releases a string produced by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a pointer previously written by this library.
#[no_mangle]
pub unsafe extern "C" fn gl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn gl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: &str, mu: &str) -> *mut GlParams {
        let lambda = CString::new(lambda).unwrap();
        let mu = CString::new(mu).unwrap();
        let mut out: *mut GlParams = ptr::null_mut();
        let status = unsafe { gl_params_new(lambda.as_ptr(), mu.as_ptr(), &mut out) };
        assert_eq!(status, GlStatus::Ok);
        out
    }

    fn take_string(s: *mut c_char) -> String {
        assert!(!s.is_null());
        let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
        unsafe { gl_string_free(s) };
        text
    }

    #[test]
    fn params_lifecycle_and_case() {
        let p = params("-1", "0");
        let mut name: *mut c_char = ptr::null_mut();
        assert_eq!(unsafe { gl_params_case(p, &mut name) }, GlStatus::Ok);
        assert_eq!(take_string(name), "mu0_lambda_minus1");
        unsafe { gl_params_free(p) };
    }

    #[test]
    fn params_rejections() {
        let lambda = CString::new("0").unwrap();
        let mu = CString::new("0").unwrap();
        let mut out: *mut GlParams = ptr::null_mut();
        let status = unsafe { gl_params_new(lambda.as_ptr(), mu.as_ptr(), &mut out) };
        assert_eq!(status, GlStatus::InvalidInput);
        assert!(out.is_null());
    }

    #[test]
    fn jacobi_and_classify_roundtrip() {
        let p = params("3", "1/3");
        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(unsafe { gl_jacobi_check(p, 5, &mut json) }, GlStatus::Ok);
        let text = take_string(json);
        assert!(text.contains("\"ok\": true"));

        let mut json2: *mut c_char = ptr::null_mut();
        assert_eq!(unsafe { gl_classify(p, 6, &mut json2) }, GlStatus::Ok);
        let text2 = take_string(json2);
        assert!(text2.contains("\"matches_theorem\": true"));
        unsafe { gl_params_free(p) };
    }

    #[test]
    fn aut_factor_via_ffi() {
        let p = params("1", "0");
        let spec = CString::new("scale 2 3\nshear 5\n").unwrap();
        let mut json: *mut c_char = ptr::null_mut();
        assert_eq!(
            unsafe { gl_aut_factor(p, 6, spec.as_ptr(), &mut json) },
            GlStatus::Ok
        );
        let text = take_string(json);
        assert!(text.contains("\"shear_e\": \"5\""));
        unsafe { gl_params_free(p) };
    }

    #[test]
    fn report_over_custom_grid() {
        let grid = CString::new("7 0\n1 1/2\n").unwrap();
        let mut json: *mut c_char = ptr::null_mut();
        let status = unsafe { gl_report(grid.as_ptr(), 6, 1, &mut json) };
        assert_eq!(status, GlStatus::Ok);
        let text = take_string(json);
        assert!(text.contains("\"matches_theorem\": true"));
        assert!(text.contains("excluded"));
    }

    #[test]
    fn null_pointer_handling() {
        let mut out: *mut GlParams = ptr::null_mut();
        let status = unsafe { gl_params_new(ptr::null(), ptr::null(), &mut out) };
        assert_eq!(status, GlStatus::NullPointer);
        unsafe { gl_params_free(ptr::null_mut()) };
        unsafe { gl_string_free(ptr::null_mut()) };
    }
}

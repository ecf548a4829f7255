//! C ABI over the solver. Instances and outcomes are opaque heap handles;
//! every fallible call returns a [`CalissonStatus`] and leaves a message
//! for [`calisson_last_error`] on the calling thread.
//!
//! Strings returned by this library must be released with
//! [`calisson_string_free`], handles with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use calisson::infinite::{solve_infinite, Window};
use calisson::instance::{parse_instance, InstanceError, TilingInstance};
use calisson::oracle::{check_tiling, check_window_tiling};
use calisson::render::{render, RenderOptions};
use calisson::solvers::{solve, Algorithm, SolveError, SolveOutcome, Status};

/// Result codes. `Ok` and `Infeasible` are both successful solves.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CalissonStatus {
    Ok = 0,
    Infeasible = 1,
    NullPointer = 2,
    InvalidUtf8 = 3,
    ParseError = 4,
    InvalidInstance = 5,
    Unsupported = 6,
    Internal = 7,
}

pub const CALISSON_ALGO_BF: u32 = 0;
pub const CALISSON_ALGO_ADVANCING: u32 = 1;
pub const CALISSON_ALGO_THURSTON: u32 = 2;
pub const CALISSON_ALGO_INFINITE: u32 = 3;

/// A validated tiling instance.
pub struct CalissonInstance {
    inner: TilingInstance,
}

/// The result of a solve: a tiling or an infeasibility certificate.
pub struct CalissonOutcome {
    inner: SolveOutcome,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> CalissonStatus) -> CalissonStatus {
    clear_error();
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("panic inside calisson");
        CalissonStatus::Internal
    })
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, CalissonStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(CalissonStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        CalissonStatus::InvalidUtf8
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message describing the last failure on this thread, or NULL. Valid until
/// the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn calisson_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn calisson_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse and validate an instance from JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn calisson_instance_from_json(json: *const c_char, out: *mut *mut CalissonInstance) -> CalissonStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return CalissonStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_instance(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(CalissonInstance { inner }));
                CalissonStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                match e {
                    InstanceError::Syntax { .. } => CalissonStatus::ParseError,
                    InstanceError::Invalid(_) => CalissonStatus::InvalidInstance,
                }
            }
        }
    })
}

/// # Safety
/// `instance` must come from [`calisson_instance_from_json`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn calisson_instance_free(instance: *mut CalissonInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Number of unit triangles of a bounded instance, 0 for the infinite grid.
///
/// # Safety
/// `instance` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn calisson_instance_triangle_count(instance: *const CalissonInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.region().triangles().len())
}

fn solve_error_status(e: &SolveError) -> CalissonStatus {
    match e {
        SolveError::Invalid(v) if v.iter().any(|v| v.code == calisson::ViolationCode::Unsupported) => {
            CalissonStatus::Unsupported
        }
        SolveError::Invalid(_) | SolveError::Untilable => CalissonStatus::InvalidInstance,
        _ => CalissonStatus::Internal,
    }
}

fn finish_solve(result: Result<SolveOutcome, SolveError>, out: *mut *mut CalissonOutcome) -> CalissonStatus {
    match result {
        Ok(inner) => {
            let status = match inner.status {
                Status::Tiled => CalissonStatus::Ok,
                Status::Infeasible => CalissonStatus::Infeasible,
            };
            // SAFETY: checked non-null by the caller.
            unsafe { *out = Box::into_raw(Box::new(CalissonOutcome { inner })) };
            status
        }
        Err(e) => {
            set_error(e.to_string());
            solve_error_status(&e)
        }
    }
}

/// Solve with one of the `CALISSON_ALGO_*` algorithms. On `Ok` or
/// `Infeasible`, `*out` holds a new outcome handle.
///
/// # Safety
/// `instance` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn calisson_solve(
    instance: *const CalissonInstance,
    algorithm: u32,
    out: *mut *mut CalissonOutcome,
) -> CalissonStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return CalissonStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let Some(instance) = instance.as_ref() else {
            set_error("null instance");
            return CalissonStatus::NullPointer;
        };
        let algo = match algorithm {
            CALISSON_ALGO_BF => Algorithm::Bf,
            CALISSON_ALGO_ADVANCING => Algorithm::Advancing,
            CALISSON_ALGO_THURSTON => Algorithm::Thurston,
            CALISSON_ALGO_INFINITE => Algorithm::Infinite,
            other => {
                set_error(format!("unknown algorithm {other}"));
                return CalissonStatus::Unsupported;
            }
        };
        let result = if algo == Algorithm::Infinite {
            solve_infinite(&instance.inner, None)
        } else {
            solve(&instance.inner, algo)
        };
        finish_solve(result, out)
    })
}

/// Solve the infinite grid and extract the tiling on the window of the given
/// radius around `(x, y, z)`.
///
/// # Safety
/// `instance` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn calisson_solve_window(
    instance: *const CalissonInstance,
    x: i64,
    y: i64,
    z: i64,
    radius: u32,
    out: *mut *mut CalissonOutcome,
) -> CalissonStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return CalissonStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let Some(instance) = instance.as_ref() else {
            set_error("null instance");
            return CalissonStatus::NullPointer;
        };
        let window = Window { center: [x, y, z], radius };
        finish_solve(solve_infinite(&instance.inner, Some(window)), out)
    })
}

/// # Safety
/// `outcome` must come from a solve call or be NULL.
#[no_mangle]
pub unsafe extern "C" fn calisson_outcome_free(outcome: *mut CalissonOutcome) {
    if !outcome.is_null() {
        drop(Box::from_raw(outcome));
    }
}

/// 1 if the outcome holds a tiling, 0 otherwise (including NULL).
///
/// # Safety
/// `outcome` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn calisson_outcome_is_tiled(outcome: *const CalissonOutcome) -> i32 {
    outcome.as_ref().map_or(0, |o| o.inner.is_tiled() as i32)
}

/// Number of lozenges in the tiling, 0 if infeasible.
///
/// # Safety
/// `outcome` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn calisson_outcome_lozenge_count(outcome: *const CalissonOutcome) -> usize {
    outcome.as_ref().and_then(|o| o.inner.tiling.as_ref()).map_or(0, |t| t.len())
}

/// Total weight of the negative cycle, 0 if the outcome is tiled.
///
/// # Safety
/// `outcome` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn calisson_outcome_cycle_weight(outcome: *const CalissonOutcome) -> i64 {
    outcome.as_ref().and_then(|o| o.inner.certificate.as_ref()).map_or(0, |c| c.total_weight)
}

/// The outcome as JSON. Free with [`calisson_string_free`]; NULL on error.
///
/// # Safety
/// `outcome` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn calisson_outcome_to_json(outcome: *const CalissonOutcome) -> *mut c_char {
    clear_error();
    match outcome.as_ref() {
        Some(o) => into_c_string(o.inner.to_json()),
        None => {
            set_error("null outcome");
            ptr::null_mut()
        }
    }
}

/// Re-check a tiled outcome with the independent validator: `Ok` if valid,
/// `Infeasible` if it breaks a rule or holds no tiling.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn calisson_outcome_check(
    instance: *const CalissonInstance,
    outcome: *const CalissonOutcome,
) -> CalissonStatus {
    guard(|| {
        let (Some(i), Some(o)) = (instance.as_ref(), outcome.as_ref()) else {
            set_error("null handle");
            return CalissonStatus::NullPointer;
        };
        let Some(t) = o.inner.tiling.as_ref() else {
            set_error("outcome holds no tiling");
            return CalissonStatus::Infeasible;
        };
        let verdict = match (i.inner.region().is_bounded(), o.inner.window) {
            (true, _) => check_tiling(&i.inner, t),
            (false, Some(w)) => check_window_tiling(&i.inner, &w.region(), t),
            (false, None) => {
                set_error("infinite outcome without window");
                return CalissonStatus::Unsupported;
            }
        };
        match verdict {
            Ok(()) => CalissonStatus::Ok,
            Err(v) => {
                set_error(v.to_string());
                CalissonStatus::Infeasible
            }
        }
    })
}

/// SVG drawing of the instance with the outcome (which may be NULL), using
/// the default layers. Free with [`calisson_string_free`]; NULL on error.
///
/// # Safety
/// `instance` must be live; `outcome` live or NULL.
#[no_mangle]
pub unsafe extern "C" fn calisson_render_svg(
    instance: *const CalissonInstance,
    outcome: *const CalissonOutcome,
) -> *mut c_char {
    clear_error();
    let Some(i) = instance.as_ref() else {
        set_error("null instance");
        return ptr::null_mut();
    };
    match render(&i.inner, outcome.as_ref().map(|o| &o.inner), &RenderOptions::default()) {
        Ok(svg) => into_c_string(svg),
        Err(v) => {
            set_error(v.to_string());
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn calisson_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

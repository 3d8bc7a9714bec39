//! C ABI over the solution families: build a solution from a JSON config,
//! evaluate it and run the residual verifier.
//!
//! Every fallible call returns an [`SrStatus`]; the message for the most
//! recent failure on the calling thread is available from
//! [`sr_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use stablerange::cli::config::Config;
use stablerange::cli::grid::default_box;
use stablerange::cli::CliError;
use stablerange::families::XPolySolution;
use stablerange::verifier::{self, VerifyOptions, DEFAULT_FD_STEP};

/// Status codes. The nonzero values below 5 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SrStatus {
    Ok = 0,
    VerifyFailed = 1,
    InvalidInput = 2,
    Construction = 3,
    Io = 4,
    NullPointer = 5,
    Utf8 = 6,
    Panic = 7,
}

/// Opaque solution handle.
pub struct SrSolution {
    sol: XPolySolution,
    pole_guard: f64,
    tolerance: f64,
    seed: u64,
}

/// Summary of a verification run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SrVerifySummary {
    pub samples: usize,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub coeff_system_max_rel: f64,
    pub finite_difference_max_deviation: f64,
    pub pass: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: SrStatus, msg: impl Into<String>) -> SrStatus {
    set_error(msg.into());
    status
}

fn from_cli(e: CliError) -> SrStatus {
    let status = match e.exit_code() {
        2 => SrStatus::InvalidInput,
        3 => SrStatus::Construction,
        4 => SrStatus::Io,
        _ => SrStatus::InvalidInput,
    };
    fail(status, e.to_string())
}

fn guarded(f: impl FnOnce() -> SrStatus) -> SrStatus {
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(SrStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, SrStatus> {
    if s.is_null() {
        return Err(fail(SrStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(SrStatus::Utf8, "string argument is not valid UTF-8"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a solution from a JSON config document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
/// On success `*out` receives a handle to release with [`sr_solution_free`].
#[no_mangle]
pub unsafe extern "C" fn sr_solution_from_config_json(json: *const c_char, out: *mut *mut SrSolution) -> SrStatus {
    guarded(|| {
        if out.is_null() {
            return fail(SrStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let cfg = match Config::from_json(text) {
            Ok(c) => c,
            Err(e) => return from_cli(e),
        };
        let sol = match cfg.build() {
            Ok(s) => s,
            Err(e) => return from_cli(e),
        };
        let h = SrSolution {
            sol,
            pole_guard: cfg.pole_guard(),
            tolerance: cfg.tolerance(),
            seed: cfg.seed(),
        };
        *out = Box::into_raw(Box::new(h));
        SrStatus::Ok
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `sol` must be NULL or a handle from [`sr_solution_from_config_json`]
/// that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn sr_solution_free(sol: *mut SrSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Whether the solution depends on `z` (three spatial dimensions).
///
/// # Safety
/// `sol` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sr_solution_has_z(sol: *const SrSolution) -> bool {
    sol.as_ref().is_some_and(|h| h.sol.equation().has_z())
}

/// Evaluates `u(t, x, y, z)`; `z` is ignored for two-dimensional families.
/// Points closer to the singular surface than the config's pole guard fail
/// with `SR_STATUS_CONSTRUCTION`.
///
/// # Safety
/// `sol` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sr_solution_eval(
    sol: *const SrSolution,
    t: f64,
    x: f64,
    y: f64,
    z: f64,
    out: *mut f64,
) -> SrStatus {
    guarded(|| {
        let Some(h) = sol.as_ref() else {
            return fail(SrStatus::NullPointer, "null solution handle");
        };
        if out.is_null() {
            return fail(SrStatus::NullPointer, "null output pointer");
        }
        match h.sol.eval([t, x, y, z], h.pole_guard) {
            Ok(v) => {
                *out = v;
                SrStatus::Ok
            }
            Err(e) => fail(SrStatus::Construction, e.to_string()),
        }
    })
}

/// Runs the residual verifier on the default box with the config's seed,
/// tolerance and pole guard. Returns `SR_STATUS_VERIFY_FAILED` when any check
/// exceeds the tolerance; `summary` is filled in either case.
///
/// # Safety
/// `sol` must be a live handle; `summary` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn sr_solution_verify(
    sol: *const SrSolution,
    samples: usize,
    summary: *mut SrVerifySummary,
) -> SrStatus {
    guarded(|| {
        let Some(h) = sol.as_ref() else {
            return fail(SrStatus::NullPointer, "null solution handle");
        };
        if samples == 0 {
            return fail(SrStatus::InvalidInput, "samples must be at least 1");
        }
        let o = VerifyOptions {
            samples,
            seed: h.seed,
            tolerance: h.tolerance,
            pole_guard: h.pole_guard,
            sample_box: default_box(),
            fd_step: DEFAULT_FD_STEP,
            record_points: 0,
        };
        let r = match verifier::verify(&h.sol, &o) {
            Ok(r) => r,
            Err(e) => return from_cli(CliError::Verify(e)),
        };
        if let Some(s) = summary.as_mut() {
            *s = SrVerifySummary {
                samples: r.samples,
                max_abs_residual: r.max_abs_residual,
                max_rel_residual: r.max_rel_residual,
                coeff_system_max_rel: r.coeff_system.max_rel_residual,
                finite_difference_max_deviation: r.finite_difference.max_deviation,
                pass: r.all_pass(),
            };
        }
        if r.all_pass() {
            SrStatus::Ok
        } else {
            fail(SrStatus::VerifyFailed, format!("max relative residual {:e}", r.max_rel_residual))
        }
    })
}

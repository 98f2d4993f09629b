//! C ABI for the roadfield library.
//!
//! Conventions:
//!
//! * Every fallible call returns an [`RfStatus`]; `RF_STATUS_OK` (0) means
//!   success. On failure, [`rf_last_error`] returns a thread-local,
//!   NUL-terminated message that stays valid until the next failing call on
//!   the same thread.
//! * Problems are opaque [`RfProblem`] handles created from the same JSON
//!   configuration the CLI accepts, and must be released with
//!   [`rf_problem_free`].
//! * No call panics across the boundary; internal panics are caught and
//!   reported as `RF_STATUS_PANIC`.

use roadfield::config::{parse_config, Resolved};
use roadfield::eigen::{eigen_on, periodic_cell_eigen, truncation_sweep, SweepFamily};
use roadfield::geometry::Geometry;
use roadfield::model::validate_hypotheses;
use roadfield::runner::{run_with_text, Task};
use roadfield::Error;
use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

/// Status codes returned by every fallible `rf_*` call.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfStatus {
    /// The call succeeded.
    Ok = 0,
    /// A solver or verdict failure; details via `rf_last_error`.
    NumericalError = 1,
    /// The configuration is invalid; details via `rf_last_error`.
    ConfigError = 2,
    /// A required pointer argument was NULL.
    NullArgument = 3,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 4,
    /// An internal panic was caught at the boundary.
    Panic = 5,
}

/// Opaque handle holding a parsed and resolved configuration.
pub struct RfProblem {
    resolved: Resolved,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> =
        RefCell::new(CString::new("").expect("empty C string"));
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NUL-free error message");
    });
}

fn status_of(err: &Error) -> RfStatus {
    if err.is_config() {
        RfStatus::ConfigError
    } else {
        RfStatus::NumericalError
    }
}

fn guarded(f: impl FnOnce() -> RfStatus) -> RfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic caught at the C boundary");
            RfStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be NULL or point to a NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, RfStatus> {
    if ptr.is_null() {
        set_error(&format!("{what} must not be NULL"));
        return Err(RfStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(&format!("{what} must be valid UTF-8"));
        RfStatus::InvalidUtf8
    })
}

fn require_out<T>(ptr: *mut T, what: &str) -> Result<(), RfStatus> {
    if ptr.is_null() {
        set_error(&format!("{what} must not be NULL"));
        return Err(RfStatus::NullArgument);
    }
    Ok(())
}

unsafe fn problem_ref<'a>(ptr: *const RfProblem) -> Result<&'a RfProblem, RfStatus> {
    if ptr.is_null() {
        set_error("problem handle must not be NULL");
        return Err(RfStatus::NullArgument);
    }
    Ok(&*ptr)
}

/// Parses a JSON configuration (the same schema the CLI reads) into an
/// opaque problem handle stored in `*out_problem`.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out_problem` must point
/// to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn rf_problem_from_json(
    config_json: *const c_char,
    out_problem: *mut *mut RfProblem,
) -> RfStatus {
    guarded(|| {
        let text = match read_str(config_json, "config_json") {
            Ok(t) => t,
            Err(status) => return status,
        };
        if let Err(status) = require_out(out_problem, "out_problem") {
            return status;
        }
        let resolved = match parse_config(text).and_then(|cfg| cfg.resolve()) {
            Ok(resolved) => resolved,
            Err(e) => {
                set_error(&e.to_string());
                return status_of(&e);
            }
        };
        *out_problem = Box::into_raw(Box::new(RfProblem { resolved }));
        RfStatus::Ok
    })
}

/// Releases a problem handle. NULL is accepted and ignored.
///
/// # Safety
/// `problem` must be NULL or a pointer returned by `rf_problem_from_json`
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn rf_problem_free(problem: *mut RfProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Principal eigenvalue of the roadless periodic cell, written to `*out`.
///
/// # Safety
/// `problem` must be a live handle; `out` must point to writable storage
/// for one double.
#[no_mangle]
pub unsafe extern "C" fn rf_cell_eigenvalue(
    problem: *const RfProblem,
    out: *mut f64,
) -> RfStatus {
    guarded(|| {
        let p = match problem_ref(problem) {
            Ok(p) => p,
            Err(status) => return status,
        };
        if let Err(status) = require_out(out, "out") {
            return status;
        }
        let r = &p.resolved;
        match periodic_cell_eigen(&r.params, Some(&r.reaction), r.grid, &r.solve) {
            Ok(pair) => {
                *out = pair.lambda;
                RfStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Principal eigenvalue of the coupled road-field problem truncated to the
/// box of the given half-width and height, written to `*out`.
///
/// # Safety
/// As for `rf_cell_eigenvalue`.
#[no_mangle]
pub unsafe extern "C" fn rf_coupled_eigenvalue(
    problem: *const RfProblem,
    half_width: f64,
    height: f64,
    out: *mut f64,
) -> RfStatus {
    guarded(|| {
        let p = match problem_ref(problem) {
            Ok(p) => p,
            Err(status) => return status,
        };
        if let Err(status) = require_out(out, "out") {
            return status;
        }
        let r = &p.resolved;
        let run = || -> Result<f64, Error> {
            let geom =
                Geometry::truncated_road_field(half_width, height, r.grid.hx, r.grid.hy)?;
            Ok(eigen_on(&geom, &r.params, Some(&r.reaction), &r.solve)?.lambda)
        };
        match run() {
            Ok(lambda) => {
                *out = lambda;
                RfStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Extrapolated coupled eigenvalue over the configured truncation sizes
/// (the `numerics.sizes` ladder), written to `*out`.
///
/// # Safety
/// As for `rf_cell_eigenvalue`.
#[no_mangle]
pub unsafe extern "C" fn rf_lambda1_estimate(
    problem: *const RfProblem,
    out: *mut f64,
) -> RfStatus {
    guarded(|| {
        let p = match problem_ref(problem) {
            Ok(p) => p,
            Err(status) => return status,
        };
        if let Err(status) = require_out(out, "out") {
            return status;
        }
        let r = &p.resolved;
        match truncation_sweep(
            SweepFamily::Coupled,
            &r.params,
            Some(&r.reaction),
            &r.sizes,
            r.grid,
            &r.solve,
        ) {
            Ok(sweep) => {
                *out = sweep.limit_estimate;
                RfStatus::Ok
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Checks the configured reaction against the monostability hypotheses.
/// Returns `RF_STATUS_OK` when all hypotheses hold; otherwise
/// `RF_STATUS_NUMERICAL_ERROR` with the failed checks in `rf_last_error`.
///
/// # Safety
/// `problem` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_validate(problem: *const RfProblem) -> RfStatus {
    guarded(|| {
        let p = match problem_ref(problem) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match validate_hypotheses(&p.resolved.reaction, 64) {
            Ok(report) if report.all_passed => RfStatus::Ok,
            Ok(report) => {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.as_str())
                    .collect();
                set_error(&format!("hypotheses failed: {}", failed.join(", ")));
                RfStatus::NumericalError
            }
            Err(e) => {
                set_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Runs one CLI task (`"eigen"`, `"sweep"`, `"evolve"`, `"classify"`,
/// `"road-effect"`, `"amplitude"`, `"audit"`, or `"validate"`) with the
/// given JSON configuration, writing artifacts under `out_dir`. Returns the
/// CLI exit code: 0 success, 1 numerical or verdict failure, 2 bad
/// configuration or arguments.
///
/// # Safety
/// All three pointers must be NULL-terminated strings (none may be NULL).
#[no_mangle]
pub unsafe extern "C" fn rf_run(
    task: *const c_char,
    config_json: *const c_char,
    out_dir: *const c_char,
    quiet: bool,
) -> i32 {
    let code = catch_unwind(AssertUnwindSafe(|| {
        let task_name = match read_str(task, "task") {
            Ok(t) => t,
            Err(_) => return 2,
        };
        let text = match read_str(config_json, "config_json") {
            Ok(t) => t,
            Err(_) => return 2,
        };
        let dir = match read_str(out_dir, "out_dir") {
            Ok(t) => t,
            Err(_) => return 2,
        };
        let Some(task) = Task::from_name(task_name) else {
            set_error(&format!("unknown task \"{task_name}\""));
            return 2;
        };
        run_with_text(task, text, Path::new(dir), quiet)
    }));
    match code {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic caught at the C boundary");
            RfStatus::Panic as i32
        }
    }
}

/// Thread-local message describing the most recent failure on this thread.
/// Never NULL; empty until the first failure. Valid until the next failing
/// `rf_*` call on the same thread.
#[no_mangle]
pub extern "C" fn rf_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

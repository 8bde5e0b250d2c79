//! C ABI for the `monce` tracking metrics.
//!
//! The surface is deliberately small: evaluate two CSV track files into
//! an opaque report handle, then pull the JSON or the headline scores out
//! of it. All functions are safe to call from any thread; the error
//! message store is thread-local.
//!
//! Ownership rules, which the header repeats per function:
//! - `monce_evaluate` hands out a report that must be released with
//!   `monce_report_free`.
//! - `monce_report_json` hands out a string that must be released with
//!   `monce_string_free`.
//! - `monce_last_error_message` borrows: the pointer is valid until the
//!   next failing call on the same thread, and must not be freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use monce::io::{evaluate_files, read_config_file, report_to_json};
use monce::metrics::MetricReport;
use monce::{Error, EvalConfig, UidCriterion};

/// Result of every fallible call in this ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonceStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// A file could not be read or parsed, or the config is invalid.
    InputError = 3,
    /// The inputs parsed but could not be evaluated.
    EvalError = 4,
    /// A bug tripped an internal invariant; the library state is still
    /// sound but the result is unavailable.
    InternalError = 5,
}

/// Opaque evaluation result. Created by `monce_evaluate`, released by
/// `monce_report_free`.
pub struct MonceReport {
    inner: MetricReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let sanitized: String = message.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(sanitized).expect("nul bytes removed"));
    });
}

fn status_of(err: &Error) -> MonceStatus {
    match err {
        Error::Io { .. } | Error::Parse { .. } | Error::Config(_) => MonceStatus::InputError,
        Error::InvalidInput(_) | Error::Metric(_) => MonceStatus::EvalError,
        Error::Internal(_) => MonceStatus::InternalError,
    }
}

/// Run `body`, translating panics into `InternalError` instead of
/// unwinding across the ABI boundary.
fn guarded(body: impl FnOnce() -> MonceStatus) -> MonceStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            MonceStatus::InternalError
        }
    }
}

/// Read a required C string argument.
///
/// # Safety
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn required_str<'a>(ptr: *const c_char) -> Result<&'a str, MonceStatus> {
    if ptr.is_null() {
        set_last_error("required argument is null");
        return Err(MonceStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error("argument is not valid UTF-8");
        MonceStatus::InvalidUtf8
    })
}

/// Library version as a static NUL-terminated string. Never null; do not
/// free.
#[no_mangle]
pub extern "C" fn monce_version() -> *const c_char {
    const VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version contains no interior NUL"),
        };
    VERSION.as_ptr()
}

/// Message for the most recent failure on this thread, or null if no
/// call has failed yet. Borrowed: valid until the next failing call on
/// the same thread; do not free.
#[no_mangle]
pub extern "C" fn monce_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |msg| msg.as_ptr())
    })
}

/// Evaluate a prediction CSV against a ground-truth CSV under both UID
/// criteria and store a new report in `*out_report`.
///
/// `config_path` may be null for default settings. On failure,
/// `*out_report` is set to null and the status describes the problem.
///
/// # Safety
/// `gt_path` and `pred_path` must be valid NUL-terminated strings;
/// `config_path` must be null or a valid NUL-terminated string;
/// `out_report` must be a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn monce_evaluate(
    gt_path: *const c_char,
    pred_path: *const c_char,
    config_path: *const c_char,
    out_report: *mut *mut MonceReport,
) -> MonceStatus {
    guarded(|| {
        if out_report.is_null() {
            set_last_error("out_report is null");
            return MonceStatus::NullArgument;
        }
        *out_report = ptr::null_mut();
        let gt = match required_str(gt_path) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let pred = match required_str(pred_path) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let cfg = if config_path.is_null() {
            EvalConfig::default()
        } else {
            let path = match required_str(config_path) {
                Ok(s) => s,
                Err(status) => return status,
            };
            match read_config_file(Path::new(path)) {
                Ok(cfg) => cfg,
                Err(e) => {
                    set_last_error(&e.to_string());
                    return status_of(&e);
                }
            }
        };
        let criteria = [UidCriterion::AnyUid, UidCriterion::OriginalUid];
        match evaluate_files(Path::new(gt), Path::new(pred), &cfg, &criteria) {
            Ok(report) => {
                *out_report = Box::into_raw(Box::new(MonceReport { inner: report }));
                MonceStatus::Ok
            }
            Err(e) => {
                set_last_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

/// Serialize a report as pretty-printed JSON into a newly allocated
/// string at `*out_json`. Release it with `monce_string_free`.
///
/// # Safety
/// `report` must be a live pointer from `monce_evaluate`; `out_json`
/// must be a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn monce_report_json(
    report: *const MonceReport,
    out_json: *mut *mut c_char,
) -> MonceStatus {
    guarded(|| {
        if report.is_null() || out_json.is_null() {
            set_last_error("required argument is null");
            return MonceStatus::NullArgument;
        }
        *out_json = ptr::null_mut();
        match report_to_json(&(*report).inner) {
            Ok(json) => {
                let c = CString::new(json).expect("JSON contains no NUL bytes");
                *out_json = c.into_raw();
                MonceStatus::Ok
            }
            Err(e) => {
                set_last_error(&e.to_string());
                status_of(&e)
            }
        }
    })
}

unsafe fn read_score(
    report: *const MonceReport,
    out: *mut f64,
    pick: impl Fn(&MetricReport) -> f64,
) -> MonceStatus {
    if report.is_null() || out.is_null() {
        set_last_error("required argument is null");
        return MonceStatus::NullArgument;
    }
    *out = pick(&(*report).inner);
    MonceStatus::Ok
}

/// Expected average overlap of the report's summary criterion.
///
/// # Safety
/// `report` must be a live pointer from `monce_evaluate`; `out` must be
/// a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn monce_report_eao(
    report: *const MonceReport,
    out: *mut f64,
) -> MonceStatus {
    guarded(|| read_score(report, out, |r| r.eao))
}

/// Precision counterpart of the expected average overlap.
///
/// # Safety
/// `report` must be a live pointer from `monce_evaluate`; `out` must be
/// a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn monce_report_eao_p(
    report: *const MonceReport,
    out: *mut f64,
) -> MonceStatus {
    guarded(|| read_score(report, out, |r| r.eao_p))
}

/// Release a report from `monce_evaluate`. Null is a no-op.
///
/// # Safety
/// `report` must be null or a pointer previously returned by
/// `monce_evaluate` that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn monce_report_free(report: *mut MonceReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Release a string from `monce_report_json`. Null is a no-op.
///
/// # Safety
/// `s` must be null or a pointer previously returned by
/// `monce_report_json` that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn monce_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

//! C interface over the feature extractor.
//!
//! Conventions: every fallible function returns an `msfeat_status` and
//! writes its result through an out pointer. Handles are opaque; free them
//! with their matching `_free` function. Strings returned through out
//! pointers are NUL-terminated, UTF-8, and owned by the caller (release
//! with `msfeat_string_free`). `msfeat_last_error_message` describes the
//! most recent failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::path::Path;

use libc::c_char;

use msfeat::dataset::{render_dataset, render_jsonl};
use msfeat::java::loc::count_effective_lines;
use msfeat::pipeline::{analyze_tree, AnalyzeOptions};
use msfeat::record::MicroserviceRecord;
use msfeat::{Error, ExtractionConfig};

/// Result codes for all fallible entry points.
#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum msfeat_status {
    MSFEAT_OK = 0,
    /// A required pointer argument was NULL.
    MSFEAT_NULL_ARG = 1,
    /// A string argument was not valid UTF-8.
    MSFEAT_UTF8 = 2,
    MSFEAT_IO = 3,
    MSFEAT_PARSE = 4,
    MSFEAT_ANALYSIS = 5,
    MSFEAT_CONFIG = 6,
}

/// Extraction settings handle.
#[allow(non_camel_case_types)]
pub struct msfeat_config(ExtractionConfig);

/// An analyzed set of per-service records.
#[allow(non_camel_case_types)]
pub struct msfeat_records(Vec<MicroserviceRecord>);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(status: msfeat_status, message: &str) -> msfeat_status {
    set_error(message);
    status
}

fn fail_with(err: &Error) -> msfeat_status {
    let status = match err {
        Error::Io { .. } => msfeat_status::MSFEAT_IO,
        Error::Maven { .. } => msfeat_status::MSFEAT_PARSE,
        Error::Config { .. } => msfeat_status::MSFEAT_CONFIG,
        _ => msfeat_status::MSFEAT_ANALYSIS,
    };
    fail(status, &err.to_string())
}

/// Reads a required C string argument; on failure records the error and
/// returns the status the caller should propagate.
unsafe fn read_str<'a>(
    ptr: *const c_char,
    what: &str,
) -> Result<&'a str, msfeat_status> {
    if ptr.is_null() {
        return Err(fail(
            msfeat_status::MSFEAT_NULL_ARG,
            &format!("{what} must not be NULL"),
        ));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        fail(
            msfeat_status::MSFEAT_UTF8,
            &format!("{what} is not valid UTF-8"),
        )
    })
}

fn give_string(text: String, out: *mut *mut c_char) -> msfeat_status {
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            msfeat_status::MSFEAT_OK
        }
        Err(_) => fail(
            msfeat_status::MSFEAT_ANALYSIS,
            "rendered text contains an interior NUL byte",
        ),
    }
}

/// Returns the library version as a static NUL-terminated string.
/// Never NULL; do not free.
#[no_mangle]
pub extern "C" fn msfeat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Returns the error message of the last failed call on this thread, or an
/// empty string when no call has failed. The pointer stays valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn msfeat_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Creates a configuration with built-in defaults. Never fails.
/// Free with `msfeat_config_free`.
#[no_mangle]
pub extern "C" fn msfeat_config_default() -> *mut msfeat_config {
    Box::into_raw(Box::new(msfeat_config(ExtractionConfig::default())))
}

/// Loads a `key = value` configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn msfeat_config_load(
    path: *const c_char,
    out: *mut *mut msfeat_config,
) -> msfeat_status {
    if out.is_null() {
        return fail(msfeat_status::MSFEAT_NULL_ARG, "out must not be NULL");
    }
    let path = match read_str(path, "path") {
        Ok(s) => s,
        Err(status) => return status,
    };
    match ExtractionConfig::load(Path::new(path)) {
        Ok(cfg) => {
            *out = Box::into_raw(Box::new(msfeat_config(cfg)));
            msfeat_status::MSFEAT_OK
        }
        Err(e) => fail_with(&e),
    }
}

/// Releases a configuration handle. NULL is a no-op.
///
/// # Safety
/// `cfg` must be NULL or a pointer from `msfeat_config_default` or
/// `msfeat_config_load` that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn msfeat_config_free(cfg: *mut msfeat_config) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Counts effective (non-blank, non-comment) lines of a source file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn msfeat_count_effective_lines(
    path: *const c_char,
    out: *mut u64,
) -> msfeat_status {
    if out.is_null() {
        return fail(msfeat_status::MSFEAT_NULL_ARG, "out must not be NULL");
    }
    let path = match read_str(path, "path") {
        Ok(s) => s,
        Err(status) => return status,
    };
    match count_effective_lines(Path::new(path)) {
        Ok(n) => {
            *out = n;
            msfeat_status::MSFEAT_OK
        }
        Err(e) => fail_with(&e),
    }
}

/// Analyzes a checked-out repository tree and returns one record per
/// discovered microservice.
///
/// `cfg` may be NULL to use defaults. `include_tests` also scans sources
/// under `src/test`. On success `*out` owns the records; free with
/// `msfeat_records_free`.
///
/// # Safety
/// `root`, `system`, and `release` must be NUL-terminated strings; `out`
/// must be a valid pointer; `cfg` must be NULL or a live config handle.
#[no_mangle]
pub unsafe extern "C" fn msfeat_analyze_tree(
    root: *const c_char,
    system: *const c_char,
    release: *const c_char,
    cfg: *const msfeat_config,
    include_tests: bool,
    out: *mut *mut msfeat_records,
) -> msfeat_status {
    if out.is_null() {
        return fail(msfeat_status::MSFEAT_NULL_ARG, "out must not be NULL");
    }
    let root = match read_str(root, "root") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let system = match read_str(system, "system") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let release = match read_str(release, "release") {
        Ok(s) => s,
        Err(status) => return status,
    };
    let default_cfg;
    let cfg = if cfg.is_null() {
        default_cfg = ExtractionConfig::default();
        &default_cfg
    } else {
        &(*cfg).0
    };
    let mut diags = Vec::new();
    let opts = AnalyzeOptions { include_tests };
    match analyze_tree(Path::new(root), system, release, cfg, opts, &mut diags) {
        Ok(analysis) => {
            *out = Box::into_raw(Box::new(msfeat_records(analysis.records)));
            msfeat_status::MSFEAT_OK
        }
        Err(e) => fail_with(&e),
    }
}

/// Number of records in the set. NULL yields 0.
///
/// # Safety
/// `records` must be NULL or a live records handle.
#[no_mangle]
pub unsafe extern "C" fn msfeat_records_len(records: *const msfeat_records) -> usize {
    if records.is_null() {
        0
    } else {
        (*records).0.len()
    }
}

/// Renders the records as the CSV dataset (header plus one row each).
///
/// # Safety
/// `records` must be a live records handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn msfeat_records_to_csv(
    records: *const msfeat_records,
    out: *mut *mut c_char,
) -> msfeat_status {
    if records.is_null() || out.is_null() {
        return fail(
            msfeat_status::MSFEAT_NULL_ARG,
            "records and out must not be NULL",
        );
    }
    give_string(render_dataset(&(*records).0), out)
}

/// Renders the records as JSON lines, one object per record.
///
/// # Safety
/// `records` must be a live records handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn msfeat_records_to_jsonl(
    records: *const msfeat_records,
    out: *mut *mut c_char,
) -> msfeat_status {
    if records.is_null() || out.is_null() {
        return fail(
            msfeat_status::MSFEAT_NULL_ARG,
            "records and out must not be NULL",
        );
    }
    give_string(render_jsonl(&(*records).0), out)
}

/// Releases a records handle. NULL is a no-op.
///
/// # Safety
/// `records` must be NULL or a pointer from `msfeat_analyze_tree` that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn msfeat_records_free(records: *mut msfeat_records) {
    if !records.is_null() {
        drop(Box::from_raw(records));
    }
}

/// Releases a string returned through an out pointer. NULL is a no-op.
///
/// # Safety
/// `s` must be NULL or a string produced by this library that has not been
/// freed yet.
#[no_mangle]
pub unsafe extern "C" fn msfeat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

//! C ABI over the `nlbox` scenario runner.
//!
//! Objects cross the boundary as opaque pointers and must be released with
//! the matching `*_free`. Every fallible call returns an [`NlboxStatus`]; on
//! failure [`nlbox_last_error_message`] describes the error for the calling
//! thread. Strings returned to the caller are freed with
//! [`nlbox_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use nlbox::quantum::{trace_distance, CMatrix, DensityOperator, C64};
use nlbox::scenario::{
    emit_table, parse_scenario, parse_scenario_str, run_scenario, OutputFormat, ProtocolResult, Report, RunOptions,
    ScenarioConfig, ScenarioError,
};
use nlbox::witness::{fit_linear_map, parse_stats};

/// Status codes. Values 2 to 6 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlboxStatus {
    Ok = 0,
    Parse = 2,
    Validation = 3,
    Convergence = 4,
    Io = 5,
    Protocol = 6,
    NullPointer = 7,
    InvalidUtf8 = 8,
    Panic = 9,
}

/// A validated scenario.
pub struct NlboxScenario {
    config: ScenarioConfig,
}

/// The result of running a scenario.
pub struct NlboxReport {
    report: Report,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: NlboxStatus, message: &str) -> NlboxStatus {
    set_error(message);
    status
}

fn from_scenario_error(e: &ScenarioError) -> NlboxStatus {
    let status = match e.exit_code() {
        2 => NlboxStatus::Parse,
        3 => NlboxStatus::Validation,
        4 => NlboxStatus::Convergence,
        5 => NlboxStatus::Io,
        _ => NlboxStatus::Protocol,
    };
    fail(status, &e.to_string())
}

fn guard(f: impl FnOnce() -> NlboxStatus) -> NlboxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(NlboxStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, NlboxStatus> {
    if s.is_null() {
        return Err(fail(NlboxStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(NlboxStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn to_c_string(s: String, out: *mut *mut c_char) -> NlboxStatus {
    match CString::new(s) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            NlboxStatus::Ok
        }
        Err(_) => fail(NlboxStatus::Protocol, "output contains a NUL byte"),
    }
}

/// Message for the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn nlbox_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nlbox_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a scenario from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nlbox_scenario_parse_str(json: *const c_char, out: *mut *mut NlboxScenario) -> NlboxStatus {
    guard(|| {
        if out.is_null() {
            return fail(NlboxStatus::NullPointer, "null output pointer");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_scenario_str(text) {
            Ok(config) => {
                *out = Box::into_raw(Box::new(NlboxScenario { config }));
                NlboxStatus::Ok
            }
            Err(e) => from_scenario_error(&e),
        }
    })
}

/// Parses and validates a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nlbox_scenario_parse_file(path: *const c_char, out: *mut *mut NlboxScenario) -> NlboxStatus {
    guard(|| {
        if out.is_null() {
            return fail(NlboxStatus::NullPointer, "null output pointer");
        }
        let path = match read_str(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match parse_scenario(Path::new(path)) {
            Ok(config) => {
                *out = Box::into_raw(Box::new(NlboxScenario { config }));
                NlboxStatus::Ok
            }
            Err(e) => from_scenario_error(&e),
        }
    })
}

/// # Safety
/// `scenario` must come from a parse call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nlbox_scenario_free(scenario: *mut NlboxScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs a scenario. `seed` may be null to use the scenario's own seed.
///
/// # Safety
/// `scenario` must be valid, `seed` null or valid, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nlbox_scenario_run(
    scenario: *const NlboxScenario,
    seed: *const u64,
    out: *mut *mut NlboxReport,
) -> NlboxStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            return fail(NlboxStatus::NullPointer, "null scenario or output pointer");
        }
        let options = RunOptions {
            seed: seed.as_ref().copied(),
            tol: None,
        };
        match run_scenario(&(*scenario).config, options) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(NlboxReport { report }));
                NlboxStatus::Ok
            }
            Err(e) => from_scenario_error(&e),
        }
    })
}

/// # Safety
/// `report` must come from [`nlbox_scenario_run`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nlbox_report_free(report: *mut NlboxReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

unsafe fn render(report: *const NlboxReport, format: OutputFormat, out: *mut *mut c_char) -> NlboxStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            return fail(NlboxStatus::NullPointer, "null report or output pointer");
        }
        match emit_table(&(*report).report, format) {
            Ok(s) => to_c_string(s, out),
            Err(e) => from_scenario_error(&e),
        }
    })
}

/// Full report as JSON. Free the string with [`nlbox_string_free`].
///
/// # Safety
/// `report` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nlbox_report_to_json(report: *const NlboxReport, out: *mut *mut c_char) -> NlboxStatus {
    render(report, OutputFormat::Json, out)
}

/// Plot-ready CSV table. Free the string with [`nlbox_string_free`].
///
/// # Safety
/// `report` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nlbox_report_to_csv(report: *const NlboxReport, out: *mut *mut c_char) -> NlboxStatus {
    render(report, OutputFormat::Csv, out)
}

/// Signaling metric of a signaling report; `NLBOX_STATUS_PROTOCOL` for
/// other report kinds.
///
/// # Safety
/// `report` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nlbox_report_signaling_metric(report: *const NlboxReport, out: *mut f64) -> NlboxStatus {
    guard(|| {
        if report.is_null() || out.is_null() {
            return fail(NlboxStatus::NullPointer, "null report or output pointer");
        }
        match &(*report).report.result {
            ProtocolResult::Signaling(s) => {
                *out = s.signaling_metric;
                NlboxStatus::Ok
            }
            _ => fail(NlboxStatus::Protocol, "report is not a signaling report"),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn nlbox_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn density(data: *const f64, dim: usize) -> Result<DensityOperator, NlboxStatus> {
    if data.is_null() {
        return Err(fail(NlboxStatus::NullPointer, "null matrix data"));
    }
    let raw = std::slice::from_raw_parts(data, 2 * dim * dim);
    let m = CMatrix::from_fn(dim, dim, |i, j| {
        let k = 2 * (i * dim + j);
        C64::new(raw[k], raw[k + 1])
    });
    DensityOperator::new(m).map_err(|e| fail(NlboxStatus::Validation, &e.to_string()))
}

/// Trace distance of two `dim x dim` density matrices, each given as
/// `2 * dim * dim` doubles: row-major, real and imaginary parts interleaved.
///
/// # Safety
/// `a` and `b` must point to `2 * dim * dim` doubles, `out` to one.
#[no_mangle]
pub unsafe extern "C" fn nlbox_trace_distance(a: *const f64, b: *const f64, dim: usize, out: *mut f64) -> NlboxStatus {
    guard(|| {
        if out.is_null() {
            return fail(NlboxStatus::NullPointer, "null output pointer");
        }
        if dim == 0 {
            return fail(NlboxStatus::Validation, "dimension must be positive");
        }
        let (ra, rb) = match (density(a, dim), density(b, dim)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match trace_distance(&ra, &rb) {
            Ok(d) => {
                *out = d;
                NlboxStatus::Ok
            }
            Err(e) => fail(NlboxStatus::Validation, &e.to_string()),
        }
    })
}

/// Fits a trace-preserving linear map to a statistics table in the text
/// format and reports the residual and minimum Choi eigenvalue.
///
/// # Safety
/// `text` must be NUL-terminated; the outputs must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn nlbox_stats_fit(
    text: *const c_char,
    residual: *mut f64,
    choi_min_eig: *mut f64,
) -> NlboxStatus {
    guard(|| {
        if residual.is_null() || choi_min_eig.is_null() {
            return fail(NlboxStatus::NullPointer, "null output pointer");
        }
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_stats(text).and_then(|t| fit_linear_map(&t)) {
            Ok(fit) => {
                *residual = fit.residual;
                *choi_min_eig = fit.choi_min_eig;
                NlboxStatus::Ok
            }
            Err(e) => from_scenario_error(&ScenarioError::from(e)),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn null_arguments_are_reported() {
        let mut out = ptr::null_mut();
        let status = unsafe { nlbox_scenario_parse_str(ptr::null(), &mut out) };
        assert_eq!(status, NlboxStatus::NullPointer);
        let msg = unsafe { CStr::from_ptr(nlbox_last_error_message()) };
        assert!(msg.to_str().unwrap().contains("null"));
    }

    #[test]
    fn version_is_terminated() {
        let v = unsafe { CStr::from_ptr(nlbox_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}

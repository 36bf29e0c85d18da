//! C ABI over the `rescon` simulator.
//!
//! Scenarios and traces are opaque heap handles released with their `_free`
//! function. Every fallible call returns an [`RcStatus`]; on failure the
//! message is available from [`rc_last_error`] on the same thread until the
//! next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use rescon::harness::{
    fit_rate, generate_scenario, read_config, run_scenario, write_trace, Scenario, ScenarioConfig, Template,
    TemplateParams, Trace,
};
use rescon::regularity::{alpha_upper_bound, rho_bound};
use rescon::{ExecutionMode, HarnessError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidConfig = 5,
    Infeasible = 6,
    Simulation = 7,
    OutOfRange = 8,
    NotApplicable = 9,
    Panic = 10,
}

/// A resolved scenario.
pub struct RcScenario {
    inner: Scenario,
}

/// The per-round record of one run.
pub struct RcTrace {
    inner: Trace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: RcStatus, msg: impl Into<String>) -> RcStatus {
    set_error(msg);
    status
}

fn harness_status(e: &HarnessError) -> RcStatus {
    match e {
        HarnessError::Io(_) => RcStatus::Io,
        HarnessError::Parse(_) | HarnessError::Serialize(_) => RcStatus::Parse,
        HarnessError::InfeasibleParameters { .. } => RcStatus::Infeasible,
        HarnessError::Simulation(_) => RcStatus::Simulation,
        HarnessError::TooFewPoints(_) => RcStatus::NotApplicable,
        _ => RcStatus::InvalidConfig,
    }
}

fn from_harness(e: HarnessError) -> RcStatus {
    fail(harness_status(&e), e.to_string())
}

/// Runs `body`, turning a panic into [`RcStatus::Panic`].
fn guard(body: impl FnOnce() -> RcStatus) -> RcStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|_| fail(RcStatus::Panic, "internal panic"))
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, RcStatus> {
    if p.is_null() {
        return Err(fail(RcStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(RcStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> RcStatus {
    if out.is_null() {
        return fail(RcStatus::NullPointer, "null output pointer");
    }
    out.write(value);
    RcStatus::Ok
}

macro_rules! try_rc {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

unsafe fn emit_scenario(config: Result<ScenarioConfig, HarnessError>, out: *mut *mut RcScenario) -> RcStatus {
    if out.is_null() {
        return fail(RcStatus::NullPointer, "null output pointer");
    }
    match config.and_then(|c| c.resolve()) {
        Ok(inner) => write_out(out, Box::into_raw(Box::new(RcScenario { inner }))),
        Err(e) => from_harness(e),
    }
}

/// Message of the last failure on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn rc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Reads and resolves a TOML scenario file.
///
/// # Safety
/// `path` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rc_scenario_load(path: *const c_char, out: *mut *mut RcScenario) -> RcStatus {
    guard(|| {
        let path = PathBuf::from(try_rc!(text(path)));
        emit_scenario(read_config(path), out)
    })
}

/// Resolves a scenario given as TOML text.
///
/// # Safety
/// `toml_text` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rc_scenario_parse(toml_text: *const c_char, out: *mut *mut RcScenario) -> RcStatus {
    guard(|| {
        let body = try_rc!(text(toml_text));
        emit_scenario(ScenarioConfig::from_toml(body), out)
    })
}

/// Builds a scenario from a named template.
///
/// `k < 0` selects the template default; `split_pos`/`split_neg` are used by
/// `scalar-two-sided` when both are positive.
///
/// # Safety
/// `template_name` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rc_scenario_generate(
    template_name: *const c_char,
    n: usize,
    f: usize,
    k: i64,
    split_pos: usize,
    split_neg: usize,
    rounds: usize,
    seed: u64,
    out: *mut *mut RcScenario,
) -> RcStatus {
    guard(|| {
        let template: Template = match try_rc!(text(template_name)).parse() {
            Ok(t) => t,
            Err(e) => return from_harness(e),
        };
        let params = TemplateParams {
            split: (split_pos > 0 && split_neg > 0).then_some((split_pos, split_neg)),
            k: usize::try_from(k).ok(),
            rounds,
            seed,
            ..TemplateParams::new(n, f)
        };
        emit_scenario(generate_scenario(template, &params), out)
    })
}

/// # Safety
/// `scenario` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rc_scenario_free(scenario: *mut RcScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// The resolved step size.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rc_scenario_alpha(scenario: *const RcScenario, out: *mut f64) -> RcStatus {
    let Some(s) = scenario.as_ref() else {
        return fail(RcStatus::NullPointer, "null scenario");
    };
    write_out(out, s.inner.alpha)
}

/// The contraction factor at the resolved step; [`RcStatus::NotApplicable`] without `mu` and `k`.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rc_scenario_rho(scenario: *const RcScenario, out: *mut f64) -> RcStatus {
    let Some(s) = scenario.as_ref() else {
        return fail(RcStatus::NullPointer, "null scenario");
    };
    match s.inner.rho() {
        Some(rho) => write_out(out, rho),
        None => fail(RcStatus::NotApplicable, "scenario has no mu and k"),
    }
}

/// Simulates the scenario; `parallel != 0` spreads per-agent work over threads with identical results.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rc_run(scenario: *const RcScenario, parallel: i32, out: *mut *mut RcTrace) -> RcStatus {
    guard(|| {
        let Some(s) = scenario.as_ref() else {
            return fail(RcStatus::NullPointer, "null scenario");
        };
        if out.is_null() {
            return fail(RcStatus::NullPointer, "null output pointer");
        }
        let mode = if parallel != 0 {
            ExecutionMode::Parallel
        } else {
            ExecutionMode::Serial
        };
        match run_scenario(&s.inner, mode) {
            Ok(inner) => write_out(out, Box::into_raw(Box::new(RcTrace { inner }))),
            Err(e) => from_harness(e),
        }
    })
}

/// # Safety
/// `trace` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rc_trace_free(trace: *mut RcTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Number of recorded rounds, `rounds + 1`; zero for a null handle.
///
/// # Safety
/// `trace` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rc_trace_len(trace: *const RcTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.inner.rows.len())
}

/// Sum of squared distances to the consensus point at round `t`.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rc_trace_v(trace: *const RcTrace, t: usize, out: *mut f64) -> RcStatus {
    let Some(tr) = trace.as_ref() else {
        return fail(RcStatus::NullPointer, "null trace");
    };
    match tr.inner.rows.get(t) {
        Some(row) => write_out(out, row.v),
        None => fail(
            RcStatus::OutOfRange,
            format!("round {t} not in trace of {} rows", tr.inner.rows.len()),
        ),
    }
}

/// Number of diagnostic checks that failed in at least one round.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rc_trace_failed_checks(trace: *const RcTrace, out: *mut usize) -> RcStatus {
    let Some(tr) = trace.as_ref() else {
        return fail(RcStatus::NullPointer, "null trace");
    };
    write_out(out, tr.inner.failed_checks().len())
}

/// Empirical per-round decay factor of `V`.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rc_trace_fit_rate(trace: *const RcTrace, out: *mut f64) -> RcStatus {
    let Some(tr) = trace.as_ref() else {
        return fail(RcStatus::NullPointer, "null trace");
    };
    match fit_rate(&tr.inner.rows) {
        Ok(rate) => write_out(out, rate),
        Err(e) => from_harness(e),
    }
}

/// Writes the per-round CSV trace.
///
/// # Safety
/// `trace` must be a live handle and `path` a valid nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rc_trace_write_csv(trace: *const RcTrace, path: *const c_char) -> RcStatus {
    guard(|| {
        let Some(tr) = trace.as_ref() else {
            return fail(RcStatus::NullPointer, "null trace");
        };
        let path = try_rc!(text(path));
        match write_trace(&tr.inner, path) {
            Ok(()) => RcStatus::Ok,
            Err(e) => from_harness(e),
        }
    })
}

/// Largest admissible step; non-positive when the parameters admit none, NaN for `mu` outside `(0, 1]` or `h = 0`.
#[no_mangle]
pub extern "C" fn rc_alpha_upper_bound(mu: f64, k: usize, f: usize, h: usize) -> f64 {
    if !(mu > 0.0 && mu <= 1.0) || h == 0 {
        return f64::NAN;
    }
    alpha_upper_bound(mu, k, f, h)
}

/// Contraction factor; [`RcStatus::OutOfRange`] unless it lies in `(0, 1)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rc_rho_bound(alpha: f64, mu: f64, k: usize, f: usize, h: usize, out: *mut f64) -> RcStatus {
    match rho_bound(alpha, mu, k, f, h) {
        Ok(rho) => write_out(out, rho),
        Err(e) => fail(RcStatus::OutOfRange, e.to_string()),
    }
}

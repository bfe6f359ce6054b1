//! C ABI over `ccbs-core`.
//!
//! Instances and solutions are opaque heap handles released with their
//! `_free` function. Fallible calls return a [`CcbsStatus`]; on failure
//! `ccbs_last_error` describes the problem for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use ccbs_core::ccbs::{solve, Solution, SolverConfig, Status, Variant};
use ccbs_core::instance::load_instance;
use ccbs_core::planfile::serialize_plans;
use ccbs_core::{Error, Instance};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcbsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    IoError = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcbsOutcome {
    Solved = 0,
    Timeout = 1,
    Infeasible = 2,
}

pub struct CcbsInstance(Instance);

pub struct CcbsSolution(Solution);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: CcbsStatus, message: impl Into<String>) -> CcbsStatus {
    let text = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
    status
}

fn from_error(err: Error) -> CcbsStatus {
    let status = match err {
        Error::Parse { .. } => CcbsStatus::ParseError,
        Error::InvalidArgument(_) => CcbsStatus::InvalidArgument,
        Error::Io(_) => CcbsStatus::IoError,
    };
    fail(status, err.to_string())
}

fn guarded(body: impl FnOnce() -> CcbsStatus) -> CcbsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(CcbsStatus::Panic, "internal panic"),
    }
}

/// # Safety
/// `p` must be null or a NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, CcbsStatus> {
    if p.is_null() {
        return Err(fail(CcbsStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(CcbsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Message of the last failed call on this thread. The pointer stays valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ccbs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds an instance from the text of a MovingAI map plus scenario, or of
/// a roadmap plus `start goal` task list. `agents == 0` takes every pair.
/// `k` is the grid neighbourhood exponent (ignored for roadmaps).
///
/// # Safety
/// `map` and `tasks` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ccbs_instance_from_text(
    map: *const c_char,
    tasks: *const c_char,
    agents: usize,
    k: u32,
    radius: f64,
    out: *mut *mut CcbsInstance,
) -> CcbsStatus {
    guarded(|| {
        if out.is_null() {
            return fail(CcbsStatus::NullPointer, "out is null");
        }
        let (map, tasks) = match (text(map, "map"), text(tasks, "tasks")) {
            (Ok(m), Ok(t)) => (m, t),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match load_instance(map, tasks, (agents > 0).then_some(agents), k, radius) {
            Ok(instance) => {
                *out = Box::into_raw(Box::new(CcbsInstance(instance)));
                CcbsStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `instance` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccbs_instance_num_agents(instance: *const CcbsInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.0.num_agents())
}

/// # Safety
/// `instance` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ccbs_instance_free(instance: *mut CcbsInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Runs one solver variant (`"vanilla"`, `"pc"`, `"ds"`, `"ds+pc"` or
/// `"ds+pc+h"`) with a time limit in seconds.
///
/// # Safety
/// `instance` must be a live handle, `variant` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ccbs_solve(
    instance: *const CcbsInstance,
    variant: *const c_char,
    time_limit: f64,
    out: *mut *mut CcbsSolution,
) -> CcbsStatus {
    guarded(|| {
        let Some(instance) = instance.as_ref() else {
            return fail(CcbsStatus::NullPointer, "instance is null");
        };
        if out.is_null() {
            return fail(CcbsStatus::NullPointer, "out is null");
        }
        let name = match text(variant, "variant") {
            Ok(n) => n,
            Err(s) => return s,
        };
        let Some(v) = Variant::parse(name) else {
            return fail(CcbsStatus::InvalidArgument, format!("unknown variant `{name}`"));
        };
        let Ok(limit) = Duration::try_from_secs_f64(time_limit) else {
            return fail(CcbsStatus::InvalidArgument, format!("bad time limit {time_limit}"));
        };
        let mut config = SolverConfig::variant(v);
        config.time_limit = limit;
        *out = Box::into_raw(Box::new(CcbsSolution(solve(&instance.0, &config))));
        CcbsStatus::Ok
    })
}

/// # Safety
/// `solution` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccbs_solution_outcome(solution: *const CcbsSolution) -> CcbsOutcome {
    match solution.as_ref().map(|s| s.0.status) {
        Some(Status::Solved) => CcbsOutcome::Solved,
        Some(Status::Timeout) => CcbsOutcome::Timeout,
        _ => CcbsOutcome::Infeasible,
    }
}

/// Sum of costs; infinity unless solved.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccbs_solution_soc(solution: *const CcbsSolution) -> f64 {
    solution.as_ref().map_or(f64::INFINITY, |s| s.0.soc)
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccbs_solution_expanded(solution: *const CcbsSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.0.expanded)
}

/// Search time in seconds, excluding heuristic precomputation.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccbs_solution_runtime(solution: *const CcbsSolution) -> f64 {
    solution.as_ref().map_or(0.0, |s| s.0.runtime.as_secs_f64())
}

/// Joint plan in plan-file format; empty unless solved. Release the string
/// with `ccbs_string_free`. Returns null if `solution` is null.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ccbs_solution_plan_text(solution: *const CcbsSolution) -> *mut c_char {
    match solution.as_ref() {
        Some(s) => CString::new(serialize_plans(&s.0.plans)).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `solution` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ccbs_solution_free(solution: *mut CcbsSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ccbs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

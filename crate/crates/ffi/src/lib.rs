//! C ABI over `poincare-halfmap`.
//!
//! Systems and cycle reports are opaque heap handles created and released
//! through this interface. Every fallible call returns a [`PhStatus`] and
//! writes its result through an out-pointer, which is left untouched on
//! failure. Panics never cross the boundary; they surface as
//! `PH_STATUS_INTERNAL`.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use poincare_halfmap::{
    self as ph, CycleReport, Error, GeneralLinearSystem, HalfMapResult, LienardParams, PwlSystem, Scenario,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotObservable = 3,
    DegenerateSystem = 4,
    NoHalfMap = 5,
    SingularPoint = 6,
    UndefinedAtAxis = 7,
    OutOfDomain = 8,
    OffLevelCurve = 9,
    SingularPath = 10,
    NoConvergence = 11,
    NoReturn = 12,
    EventMissed = 13,
    IndexOutOfRange = 14,
    Internal = 15,
}

impl From<&Error> for PhStatus {
    fn from(e: &Error) -> Self {
        match e.root() {
            Error::NotObservable => PhStatus::NotObservable,
            Error::DegenerateSystem => PhStatus::DegenerateSystem,
            Error::NoHalfMap { .. } => PhStatus::NoHalfMap,
            Error::SingularPoint { .. } => PhStatus::SingularPoint,
            Error::UndefinedAtAxis => PhStatus::UndefinedAtAxis,
            Error::OutOfDomain { .. } => PhStatus::OutOfDomain,
            Error::OffLevelCurve { .. } => PhStatus::OffLevelCurve,
            Error::SingularPath { .. } => PhStatus::SingularPath,
            Error::NoConvergence { .. } => PhStatus::NoConvergence,
            Error::NoReturn { .. } => PhStatus::NoReturn,
            Error::EventMissed => PhStatus::EventMissed,
            Error::InvalidArgument(_) | Error::Zone { .. } => PhStatus::InvalidArgument,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhScenario {
    S0 = 0,
    S1 = 1,
    S2 = 2,
    NoHalfMap = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhClassification {
    pub scenario: PhScenario,
    pub c: f64,
    pub q: f64,
    /// Loop constant.
    pub d: f64,
    /// False when the admissible interval is empty.
    pub has_interval: bool,
    /// `-INFINITY` when unbounded.
    pub lower: f64,
    /// `INFINITY` when unbounded.
    pub upper: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhHalfMap {
    pub image: f64,
    pub tau: f64,
    pub residual: f64,
    pub iterations: usize,
    pub boundary: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhLimitCycle {
    pub y0: f64,
    pub y1: f64,
    pub period: f64,
    pub multiplier: f64,
}

/// Opaque Liénard system `x' = Tx - y, y' = Dx - a`.
pub struct PhSystem(LienardParams);

/// Opaque result of a limit-cycle search.
pub struct PhCycleReport(CycleReport);

impl From<HalfMapResult> for PhHalfMap {
    fn from(r: HalfMapResult) -> Self {
        PhHalfMap { image: r.image, tau: r.tau, residual: r.residual, iterations: r.iterations, boundary: r.boundary }
    }
}

/// Runs `f`, mapping errors and panics to status codes and storing the value
/// in `out` on success.
fn guarded<T>(out: *mut T, f: impl FnOnce() -> Result<T, PhStatus>) -> PhStatus {
    if out.is_null() {
        return PhStatus::NullPointer;
    }
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => {
            // SAFETY: non-null and, per the caller contract, valid for writes.
            unsafe { out.write(v) };
            PhStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => PhStatus::Internal,
    }
}

fn lift<T>(r: ph::Result<T>) -> Result<T, PhStatus> {
    r.map_err(|e| PhStatus::from(&e))
}

/// # Safety
/// `sys` must be null or a live handle from this library.
unsafe fn params<'a>(sys: *const PhSystem) -> Result<&'a LienardParams, PhStatus> {
    sys.as_ref().map(|s| &s.0).ok_or(PhStatus::NullPointer)
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn ph_status_message(status: PhStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        PhStatus::Ok => b"ok\0",
        PhStatus::NullPointer => b"null pointer argument\0",
        PhStatus::InvalidArgument => b"invalid argument\0",
        PhStatus::NotObservable => b"system is not observable (m12 = 0)\0",
        PhStatus::DegenerateSystem => b"degenerate system (a = D = 0)\0",
        PhStatus::NoHalfMap => b"no left half-map exists\0",
        PhStatus::SingularPoint => b"V(0, y) vanishes on the integration range\0",
        PhStatus::UndefinedAtAxis => b"index-like function undefined at y = 0\0",
        PhStatus::OutOfDomain => b"argument outside the half-map domain\0",
        PhStatus::OffLevelCurve => b"point is not on the half-map level curve\0",
        PhStatus::SingularPath => b"path crosses the zero set of V\0",
        PhStatus::NoConvergence => b"iteration did not converge\0",
        PhStatus::NoReturn => b"orbit does not return to the section\0",
        PhStatus::EventMissed => b"return to the section could not be bracketed\0",
        PhStatus::IndexOutOfRange => b"index out of range\0",
        PhStatus::Internal => b"internal error\0",
    };
    msg.as_ptr().cast()
}

/// Creates a system from Liénard parameters.
///
/// # Safety
/// `out` must be valid for writes. Release the handle with [`ph_system_free`].
#[no_mangle]
pub unsafe extern "C" fn ph_system_new(a: f64, t: f64, d: f64, out: *mut *mut PhSystem) -> PhStatus {
    guarded(out, || {
        let p = lift(LienardParams::new(a, t, d))?;
        Ok(Box::into_raw(Box::new(PhSystem(p))))
    })
}

/// Creates a system from `x' = Mx + b`, `M` in row-major order.
///
/// # Safety
/// `m` must point to 4 readable doubles, `b` to 2, and `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn ph_system_from_matrix(m: *const f64, b: *const f64, out: *mut *mut PhSystem) -> PhStatus {
    if m.is_null() || b.is_null() {
        return PhStatus::NullPointer;
    }
    let m = std::slice::from_raw_parts(m, 4);
    let b = std::slice::from_raw_parts(b, 2);
    guarded(out, || {
        let sys = GeneralLinearSystem::new([[m[0], m[1]], [m[2], m[3]]], [b[0], b[1]]);
        let p = lift(sys.to_lienard())?;
        Ok(Box::into_raw(Box::new(PhSystem(p))))
    })
}

/// Reads back the Liénard parameters `(a, T, D)`.
///
/// # Safety
/// `sys` must be a live handle; `out` must point to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ph_system_params(sys: *const PhSystem, out: *mut f64) -> PhStatus {
    let p = match params(sys) {
        Ok(p) => *p,
        Err(s) => return s,
    };
    if out.is_null() {
        return PhStatus::NullPointer;
    }
    std::ptr::copy_nonoverlapping([p.a, p.t, p.d].as_ptr(), out, 3);
    PhStatus::Ok
}

/// # Safety
/// `sys` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ph_system_free(sys: *mut PhSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// # Safety
/// `sys` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ph_classify(sys: *const PhSystem, out: *mut PhClassification) -> PhStatus {
    guarded(out, || {
        let c = lift(params(sys)?.classify())?;
        let scenario = match c.scenario {
            Scenario::S0 => PhScenario::S0,
            Scenario::S1 => PhScenario::S1,
            Scenario::S2 => PhScenario::S2,
            Scenario::NoHalfMap => PhScenario::NoHalfMap,
        };
        let (has_interval, lower, upper) = match c.interval {
            Some(i) => (true, i.lower.unwrap_or(f64::NEG_INFINITY), i.upper.unwrap_or(f64::INFINITY)),
            None => (false, f64::NAN, f64::NAN),
        };
        Ok(PhClassification { scenario, c: c.c, q: c.q, d: c.d, has_interval, lower, upper })
    })
}

/// Left half-map at `y0 >= 0`.
///
/// # Safety
/// `sys` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ph_left_halfmap(sys: *const PhSystem, y0: f64, out: *mut PhHalfMap) -> PhStatus {
    guarded(out, || lift(ph::left_halfmap(params(sys)?, y0)).map(PhHalfMap::from))
}

/// Right half-map at `y1 <= 0`; `image` receives `y0`.
///
/// # Safety
/// `sys` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ph_right_halfmap(sys: *const PhSystem, y1: f64, out: *mut PhHalfMap) -> PhStatus {
    guarded(out, || lift(ph::right_halfmap(params(sys)?, y1)).map(PhHalfMap::from))
}

/// Value of the left half-map branch at the tangency point.
///
/// # Safety
/// `sys` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ph_boundary_point(sys: *const PhSystem, out: *mut f64) -> PhStatus {
    guarded(out, || lift(ph::boundary_point(params(sys)?)))
}

/// Index-like function `F(y1, y0)`.
///
/// # Safety
/// `sys` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ph_index_f(sys: *const PhSystem, y1: f64, y0: f64, out: *mut f64) -> PhStatus {
    guarded(out, || lift(ph::index_f(params(sys)?, y1, y0)))
}

/// Left excursion by direct integration of the flow; `residual` receives
/// `|x|` at the located crossing and `iterations` the accepted steps.
///
/// # Safety
/// `sys` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ph_oracle_left_halfmap(
    sys: *const PhSystem,
    y0: f64,
    rtol: f64,
    out: *mut PhHalfMap,
) -> PhStatus {
    guarded(out, || {
        let r = lift(ph::oracle_left_halfmap(params(sys)?, y0, rtol))?;
        Ok(PhHalfMap { image: r.y1, tau: r.tau, residual: r.event_residual, iterations: r.steps, boundary: false })
    })
}

/// Searches crossing limit cycles of the two-zone system with `left`
/// governing `x < 0` and `right` governing `x > 0`.
///
/// # Safety
/// `left` and `right` must be live handles and `out` valid for writes.
/// Release the report with [`ph_cycle_report_free`].
#[no_mangle]
pub unsafe extern "C" fn ph_find_limit_cycles(
    left: *const PhSystem,
    right: *const PhSystem,
    y0_max: f64,
    grid: usize,
    out: *mut *mut PhCycleReport,
) -> PhStatus {
    guarded(out, || {
        let s = lift(PwlSystem::new(*params(left)?, *params(right)?))?;
        let report = lift(ph::find_limit_cycles(&s, y0_max, grid))?;
        Ok(Box::into_raw(Box::new(PhCycleReport(report))))
    })
}

/// Number of cycles in the report (0 for a null handle).
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ph_cycle_report_len(report: *const PhCycleReport) -> usize {
    report.as_ref().map_or(0, |r| r.0.cycles.len())
}

/// Whether every scanned orbit was found periodic.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ph_cycle_report_is_degenerate(report: *const PhCycleReport) -> bool {
    report.as_ref().is_some_and(|r| r.0.degenerate_continuum)
}

/// Cycle `index`, in increasing `y0`.
///
/// # Safety
/// `report` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ph_cycle_report_get(
    report: *const PhCycleReport,
    index: usize,
    out: *mut PhLimitCycle,
) -> PhStatus {
    guarded(out, || {
        let r = report.as_ref().ok_or(PhStatus::NullPointer)?;
        let c = r.0.cycles.get(index).ok_or(PhStatus::IndexOutOfRange)?;
        Ok(PhLimitCycle { y0: c.y0, y1: c.y1, period: c.period, multiplier: c.multiplier })
    })
}

/// # Safety
/// `report` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ph_cycle_report_free(report: *mut PhCycleReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

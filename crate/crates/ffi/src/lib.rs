//! C interface to `fatpoint`.
//!
//! Cycles and traces cross the boundary as opaque handles; everything else
//! travels as NUL-terminated UTF-8 JSON. Every function returns a
//! [`FatpointStatus`]; on failure a message is available from
//! [`fatpoint_last_error_message`] until the next call on the same thread.
//! Strings handed out by the library must be released with
//! [`fatpoint_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fatpoint::cycles::{mod_i_equivalent, TriangularCycle};
use fatpoint::document::{from_json, to_json, CycleDocument, SymbolDocument, TraceDocument};
use fatpoint::parse::parse_series;
use fatpoint::reduction::{regulator, replay_trace, ReductionTrace, Replay};
use fatpoint::scalars::FieldSpec;
use fatpoint::witt::WittVector;
use fatpoint::Error;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FatpointStatus {
    Ok = 0,
    NullPointer = 1,
    Parse = 2,
    Math = 3,
    Precision = 4,
    ReplayFailed = 5,
    Panic = 6,
}

/// A validated-or-not triangular cycle.
pub struct FatpointCycle {
    cycle: TriangularCycle,
}

/// A reduction trace together with the cycle it reduces.
pub struct FatpointTrace {
    source: TriangularCycle,
    trace: ReductionTrace,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Null(&'static str),
    Lib(Error),
    Replay(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn status_of(e: &Error) -> FatpointStatus {
    match e {
        Error::Parse { .. } => FatpointStatus::Parse,
        Error::PrecisionRequest { .. } | Error::PrecisionExhausted(_) | Error::IterationCapExceeded { .. } => {
            FatpointStatus::Precision
        }
        _ => FatpointStatus::Math,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FatpointStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FatpointStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("{what} is null"));
            FatpointStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Replay(why))) => {
            set_error(&why);
            FatpointStatus::ReplayFailed
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {msg}"));
            FatpointStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| {
        Failure::Lib(Error::Parse { line: 0, column: e.valid_up_to() + 1, message: format!("{what} is not UTF-8") })
    })
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("output string"));
    }
    let c = CString::new(s).expect("JSON has no NUL bytes");
    out.write(c.into_raw());
    Ok(())
}

/// Parses a cycle document. `default_precision` applies when the document
/// has no `precision` field; pass 0 for the `2m + 4` default with `m = 4`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fatpoint_cycle_parse(
    json: *const c_char,
    default_precision: usize,
    out: *mut *mut FatpointCycle,
) -> FatpointStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let src = text(json, "json")?;
        let prec = if default_precision == 0 { 12 } else { default_precision };
        let cycle = from_json::<CycleDocument>(src)?.to_cycle(prec)?;
        put(out, Box::into_raw(Box::new(FatpointCycle { cycle })), "out")
    })
}

/// # Safety
/// `cycle` must come from [`fatpoint_cycle_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fatpoint_cycle_free(cycle: *mut FatpointCycle) {
    if !cycle.is_null() {
        drop(Box::from_raw(cycle));
    }
}

/// Checks admissibility; the diagnostic is left in the last error message.
///
/// # Safety
/// `cycle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fatpoint_cycle_validate(cycle: *const FatpointCycle) -> FatpointStatus {
    guard(|| {
        handle(cycle, "cycle")?.cycle.validate()?;
        Ok(())
    })
}

/// Writes up to `capacity` degrees into `degrees` and the number of levels
/// into `len`. Passing a null `degrees` with `capacity` 0 only reports `len`.
///
/// # Safety
/// `degrees` must hold `capacity` entries; `len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fatpoint_cycle_degree_vector(
    cycle: *const FatpointCycle,
    degrees: *mut u32,
    capacity: usize,
    len: *mut usize,
) -> FatpointStatus {
    guard(|| {
        let d = handle(cycle, "cycle")?.cycle.degree_vector();
        put(len, d.len(), "len")?;
        if capacity > 0 {
            if degrees.is_null() {
                return Err(Failure::Null("degrees"));
            }
            for (k, v) in d.iter().take(capacity).enumerate() {
                degrees.add(k).write(*v);
            }
        }
        Ok(())
    })
}

/// Serializes the cycle as a cycle document.
///
/// # Safety
/// `cycle` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fatpoint_cycle_to_json(cycle: *const FatpointCycle, out: *mut *mut c_char) -> FatpointStatus {
    guard(|| {
        let c = handle(cycle, "cycle")?;
        put_string(out, to_json(&CycleDocument::from_cycle(&c.cycle)))
    })
}

/// Computes the regulator modulo `t^m`. The symbol document is written to
/// `symbol_json`; if `trace` is non-null it receives a new trace handle.
///
/// # Safety
/// `cycle` must be a live handle; `symbol_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fatpoint_regulator(
    cycle: *const FatpointCycle,
    m: usize,
    symbol_json: *mut *mut c_char,
    trace: *mut *mut FatpointTrace,
) -> FatpointStatus {
    guard(|| {
        let c = handle(cycle, "cycle")?;
        if symbol_json.is_null() {
            return Err(Failure::Null("symbol_json"));
        }
        let (sym, tr) = regulator(&c.cycle, m)?;
        put_string(symbol_json, to_json(&SymbolDocument::from_sum(&sym)))?;
        if !trace.is_null() {
            let h = FatpointTrace { source: c.cycle.clone(), trace: tr };
            trace.write(Box::into_raw(Box::new(h)));
        }
        Ok(())
    })
}

/// Replays every certificate; returns `ReplayFailed` with the reason in the
/// last error message when one is rejected.
///
/// # Safety
/// `trace` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fatpoint_trace_replay(trace: *const FatpointTrace) -> FatpointStatus {
    guard(|| match replay_trace(&handle(trace, "trace")?.trace) {
        Replay::Verified => Ok(()),
        Replay::Rejected(why) => Err(Failure::Replay(why)),
    })
}

/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fatpoint_trace_to_json(trace: *const FatpointTrace, out: *mut *mut c_char) -> FatpointStatus {
    guard(|| {
        let t = handle(trace, "trace")?;
        put_string(out, to_json(&TraceDocument::from_trace(&t.source, &t.trace)))
    })
}

/// Loads a trace document, for instance one written by `fatpoint reduce --emit-trace`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fatpoint_trace_from_json(json: *const c_char, out: *mut *mut FatpointTrace) -> FatpointStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let doc: TraceDocument = from_json(text(json, "json")?)?;
        let trace = doc.to_trace()?;
        let source = match trace.certificates.first() {
            Some(c) => c.before.clone(),
            None => fatpoint::cycles::graph(&trace.coordinates)?.with_multiplicity(trace.multiplicity),
        };
        put(out, Box::into_raw(Box::new(FatpointTrace { source, trace })), "out")
    })
}

/// # Safety
/// `trace` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fatpoint_trace_free(trace: *mut FatpointTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Decides whether two cycles agree modulo `t^m`.
///
/// # Safety
/// Both handles must be live and `equivalent` valid.
#[no_mangle]
pub unsafe extern "C" fn fatpoint_cycles_equivalent(
    a: *const FatpointCycle,
    b: *const FatpointCycle,
    m: usize,
    equivalent: *mut bool,
) -> FatpointStatus {
    guard(|| {
        let (a, b) = (handle(a, "a")?, handle(b, "b")?);
        let eq = mod_i_equivalent(&a.cycle, &b.cycle, m)?;
        put(equivalent, eq, "equivalent")
    })
}

/// Witt vector arithmetic on series literals of length `m`.
///
/// `op` is one of `add`, `mul`, `coords`, `ghost`; `field` is `Q` or `F<p>`.
/// `y` is ignored (and may be null) for the unary operations. The result is
/// a JSON object with `result` and `coordinates`, or `ghost`.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fatpoint_witt(
    op: *const c_char,
    field: *const c_char,
    m: usize,
    x: *const c_char,
    y: *const c_char,
    out: *mut *mut c_char,
) -> FatpointStatus {
    guard(|| {
        let op = text(op, "op")?;
        let field: FieldSpec = text(field, "field")?.parse()?;
        let load = |p: *const c_char, what: &'static str| -> Result<WittVector, Failure> {
            let s = parse_series(text(p, what)?, field, m + 1)?;
            Ok(WittVector::from_series(&s, m)?)
        };
        let strings = |v: Vec<fatpoint::scalars::FieldElement>| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        let x = load(x, "x")?;
        let value = match op {
            "add" | "mul" => {
                let y = load(y, "y")?;
                let r = if op == "add" { x.add(&y)? } else { x.mul(&y)? };
                serde_json::json!({ "result": r.to_string(), "coordinates": strings(r.coordinates()) })
            }
            "coords" => serde_json::json!({ "coordinates": strings(x.coordinates()) }),
            "ghost" => serde_json::json!({ "ghost": strings(x.ghost()) }),
            other => return Err(Failure::Lib(Error::Unsupported(format!("unknown Witt operation {other}")))),
        };
        put_string(out, value.to_string())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fatpoint_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent failure on this thread, or an empty string.
/// The pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn fatpoint_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fatpoint_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

//! C ABI for curve documents and multiplicity computations.
//!
//! Callers load a JSON curve document into an opaque handle, query it, and
//! compute multiplicities by any method. Results arrive as decimal strings
//! (multiplicities are arbitrary-precision integers); every fallible call
//! returns a status code and the last error message is retrievable per
//! thread. All functions are safe to call from multiple threads as long as
//! each handle is used from one thread at a time.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};

use tropmult::curve::PsiVector;
use tropmult::doc::CurveDocument;

/// Status codes mirroring the CLI exit codes.
#[repr(C)]
#[derive(Copy, Clone, PartialEq, Eq)]
pub enum TropmultStatus {
    Ok = 0,
    ParseError = 1,
    PreconditionError = 2,
    InvariantError = 3,
    /// Null pointer or invalid UTF-8 handed across the boundary.
    UsageError = 4,
}

/// Multiplicity methods exposed over the ABI.
#[repr(C)]
#[derive(Copy, Clone, PartialEq, Eq)]
pub enum TropmultMethod {
    Det = 0,
    Trqft = 1,
    TrqftTree = 2,
    BoxSubalgebra = 3,
    Bracket = 4,
    Split = 5,
}

/// Opaque curve handle: a parsed document plus its decoded instance.
pub struct TropmultCurve {
    curve: tropmult::curve::TropicalCurve,
    constraints: Vec<tropmult::constraints::AffineConstraint>,
    psi: PsiVector,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

fn status_of(err: &tropmult::Error) -> TropmultStatus {
    match err.exit_code() {
        1 => TropmultStatus::ParseError,
        2 => TropmultStatus::PreconditionError,
        _ => TropmultStatus::InvariantError,
    }
}

/// Last error message for this thread; valid until the next failing call.
#[no_mangle]
pub extern "C" fn tropmult_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parse a JSON curve document. On success writes a handle through `out`;
/// the caller frees it with `tropmult_curve_free`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tropmult_curve_load_json(
    json: *const c_char,
    out: *mut *mut TropmultCurve,
) -> TropmultStatus {
    if json.is_null() || out.is_null() {
        set_error("null pointer");
        return TropmultStatus::UsageError;
    }
    let Ok(text) = CStr::from_ptr(json).to_str() else {
        set_error("document is not valid UTF-8");
        return TropmultStatus::UsageError;
    };
    match CurveDocument::parse(text).and_then(|d| d.to_instance()) {
        Ok((curve, constraints, psi)) => {
            *out = Box::into_raw(Box::new(TropmultCurve {
                curve,
                constraints,
                psi,
            }));
            TropmultStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Free a handle returned by `tropmult_curve_load_json`.
///
/// # Safety
/// `handle` must come from `tropmult_curve_load_json` and not be used after.
#[no_mangle]
pub unsafe extern "C" fn tropmult_curve_free(handle: *mut TropmultCurve) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Structural validation; 0 when every invariant holds. Diagnostics go to
/// the error message.
///
/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tropmult_curve_validate(handle: *const TropmultCurve) -> TropmultStatus {
    let Some(h) = handle.as_ref() else {
        set_error("null handle");
        return TropmultStatus::UsageError;
    };
    let diag = h.curve.validate();
    if !diag.is_empty() {
        set_error(&diag.join("; "));
        return TropmultStatus::PreconditionError;
    }
    if let Err(e) = tropmult::constraints::check_constraints(&h.curve, &h.constraints) {
        set_error(&e.to_string());
        return status_of(&e);
    }
    TropmultStatus::Ok
}

/// Genus of the curve, or −1 on a null handle.
///
/// # Safety
/// `handle` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn tropmult_curve_genus(handle: *const TropmultCurve) -> c_int {
    match handle.as_ref() {
        Some(h) => h.curve.genus() as c_int,
        None => -1,
    }
}

/// Compute the multiplicity with the given method and write it through
/// `out` as a NUL-terminated decimal string (caller frees it with
/// `tropmult_string_free`). `sink_or_edge` selects the sink vertex for the
/// tree/bracket methods or the split edge; pass −1 for the defaults.
///
/// # Safety
/// `handle` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tropmult_mult(
    handle: *const TropmultCurve,
    method: TropmultMethod,
    sink_or_edge: i64,
    out: *mut *mut c_char,
) -> TropmultStatus {
    let Some(h) = handle.as_ref() else {
        set_error("null handle");
        return TropmultStatus::UsageError;
    };
    if out.is_null() {
        set_error("null output pointer");
        return TropmultStatus::UsageError;
    }
    let sink = if sink_or_edge >= 0 {
        sink_or_edge as u32
    } else {
        h.curve.vertices[0].id
    };
    let result = match method {
        TropmultMethod::Det => tropmult::mult::mult(&h.curve, &h.constraints),
        TropmultMethod::Trqft => tropmult::trqft::mult_trqft(&h.curve, &h.constraints),
        TropmultMethod::TrqftTree => tropmult::trqft::evaluate_tree(&h.curve, &h.constraints, sink)
            .and_then(|sq| exact_sqrt(&sq)),
        TropmultMethod::BoxSubalgebra => {
            tropmult::trqft::evaluate_box(&h.curve, &h.constraints).and_then(|sq| exact_sqrt(&sq))
        }
        TropmultMethod::Bracket => tropmult::bracket::mult_bracket(&h.curve, &h.constraints, sink),
        TropmultMethod::Split => {
            let edge =
                if sink_or_edge >= 0 {
                    Ok(sink_or_edge as u32)
                } else {
                    h.curve.compact_edges().map(|e| e.id).next().ok_or_else(|| {
                        tropmult::Error::Precondition("no compact edge to split".into())
                    })
                };
            edge.and_then(|e| tropmult::splitting::splitting_sum(&h.curve, &h.constraints, e, None))
        }
    };
    match result {
        Ok(v) => {
            let s = CString::new(v.to_string()).unwrap();
            *out = s.into_raw();
            TropmultStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

fn exact_sqrt(sq: &num_bigint::BigInt) -> tropmult::Result<num_bigint::BigInt> {
    let root = sq.sqrt();
    if &(&root * &root) != sq {
        return Err(tropmult::Error::Invariant(format!(
            "value {sq} is not a perfect square"
        )));
    }
    Ok(root)
}

/// Canonical JSON serialization of a handle's document; caller frees the
/// string.
///
/// # Safety
/// `handle` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tropmult_curve_to_json(
    handle: *const TropmultCurve,
    out: *mut *mut c_char,
) -> TropmultStatus {
    let Some(h) = handle.as_ref() else {
        set_error("null handle");
        return TropmultStatus::UsageError;
    };
    if out.is_null() {
        set_error("null output pointer");
        return TropmultStatus::UsageError;
    }
    let doc = CurveDocument::from_instance(&h.curve, &h.constraints, &h.psi);
    let s = CString::new(doc.to_json()).unwrap();
    *out = s.into_raw();
    TropmultStatus::Ok
}

/// Free a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be used after.
#[no_mangle]
pub unsafe extern "C" fn tropmult_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc_json(fixture: &str) -> CString {
        let doc = match fixture {
            "e1" => {
                let (c, a, p) = tropmult::fixtures::e1();
                CurveDocument::from_instance(&c, &a, &p)
            }
            "e2" => {
                let (c, a, p) = tropmult::fixtures::e2(3);
                CurveDocument::from_instance(&c, &a, &p)
            }
            "genus1" => {
                let (c, a, p) = tropmult::fixtures::genus1(&[1, 1, 1, 2, 1, 3]);
                CurveDocument::from_instance(&c, &a, &p)
            }
            _ => unreachable!(),
        };
        CString::new(doc.to_json()).unwrap()
    }

    unsafe fn load(fixture: &str) -> *mut TropmultCurve {
        let json = doc_json(fixture);
        let mut handle: *mut TropmultCurve = std::ptr::null_mut();
        let st = tropmult_curve_load_json(json.as_ptr(), &mut handle);
        assert!(st == TropmultStatus::Ok);
        handle
    }

    unsafe fn mult_str(h: *const TropmultCurve, m: TropmultMethod) -> String {
        let mut out: *mut c_char = std::ptr::null_mut();
        let st = tropmult_mult(h, m, -1, &mut out);
        assert!(st == TropmultStatus::Ok, "{:?}", {
            CStr::from_ptr(tropmult_last_error())
                .to_string_lossy()
                .to_string()
        });
        let s = CStr::from_ptr(out).to_str().unwrap().to_string();
        tropmult_string_free(out);
        s
    }

    #[test]
    fn load_compute_free_through_the_abi() {
        unsafe {
            let h = load("genus1");
            assert_eq!(tropmult_curve_genus(h), 1);
            assert!(tropmult_curve_validate(h) == TropmultStatus::Ok);
            assert_eq!(mult_str(h, TropmultMethod::Det), "5");
            assert_eq!(mult_str(h, TropmultMethod::Trqft), "5");
            assert_eq!(mult_str(h, TropmultMethod::TrqftTree), "5");
            tropmult_curve_free(h);

            let h = load("e2");
            for m in [
                TropmultMethod::Det,
                TropmultMethod::Trqft,
                TropmultMethod::TrqftTree,
                TropmultMethod::BoxSubalgebra,
                TropmultMethod::Bracket,
                TropmultMethod::Split,
            ] {
                assert_eq!(mult_str(h, m), "9");
            }
            tropmult_curve_free(h);
        }
    }

    #[test]
    fn parse_errors_surface_with_messages() {
        unsafe {
            let bad = CString::new("{not json").unwrap();
            let mut handle: *mut TropmultCurve = std::ptr::null_mut();
            let st = tropmult_curve_load_json(bad.as_ptr(), &mut handle);
            assert!(st == TropmultStatus::ParseError);
            let msg = CStr::from_ptr(tropmult_last_error()).to_str().unwrap();
            assert!(msg.contains("parse"), "{msg}");
            // null safety
            assert!(
                tropmult_curve_load_json(std::ptr::null(), &mut handle)
                    == TropmultStatus::UsageError
            );
            tropmult_curve_free(std::ptr::null_mut());
        }
    }

    #[test]
    fn json_round_trips_through_the_handle() {
        unsafe {
            let h = load("e1");
            let mut out: *mut c_char = std::ptr::null_mut();
            assert!(tropmult_curve_to_json(h, &mut out) == TropmultStatus::Ok);
            let text = CStr::from_ptr(out).to_str().unwrap().to_string();
            tropmult_string_free(out);
            let reparsed = CurveDocument::parse(&text).unwrap();
            assert_eq!(text, reparsed.to_json());
            tropmult_curve_free(h);
        }
    }
}

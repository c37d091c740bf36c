//! C interface to `qhom`.
//!
//! Windows and certificates are opaque heap handles owned by the caller and
//! released with the matching `_free` function. Every fallible call returns
//! a [`QhomStatus`]; on anything but `QHOM_STATUS_OK` a message is available from
//! [`qhom_last_error`] on the same thread. Strings handed out by the library
//! must be released with [`qhom_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qhom::approximator::ApproxError;
use qhom::io::{certificate_to_json, window_from_json};
use qhom::quasihom::{delta, normalize, verify_direct};
use qhom::{
    approximate, detect_structure, ApproxCertificate, FindingKind, QuasiHomWindow, Verification,
};

/// Result codes; the numeric values match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QhomStatus {
    Ok = 0,
    /// The input is well formed but fails a mathematical check.
    Semantic = 1,
    /// Malformed JSON, bad parameters or a null pointer.
    InvalidInput = 2,
    /// The window is too small to decide.
    Inconclusive = 3,
    /// A Rust panic was caught at the boundary.
    Internal = 4,
}

/// Opaque window handle.
pub struct QhomWindow(QuasiHomWindow);

/// Opaque certificate handle.
pub struct QhomCertificate(ApproxCertificate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    // interior NULs cannot cross the boundary
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(QhomStatus, String);

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(QhomStatus::InvalidInput, msg.into())
}

impl From<ApproxError> for Failure {
    fn from(e: ApproxError) -> Self {
        let status = match e {
            ApproxError::NotQuasihom { .. }
            | ApproxError::DeltaRank { .. }
            | ApproxError::NoApapPeriod { .. } => QhomStatus::Semantic,
            ApproxError::Inconclusive { .. } => QhomStatus::Inconclusive,
            _ => QhomStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<QhomStatus, Failure>) -> QhomStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error: panic in qhom");
            QhomStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| invalid(format!("{what} is null")))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| invalid(format!("{what} is null")))
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| invalid("output contains NUL"))
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn qhom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a window from its JSON form (`{"n", "N", "values"}`).
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qhom_window_from_json(
    json: *const c_char,
    out: *mut *mut QhomWindow,
) -> QhomStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let text = deref(json, "json")?;
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| invalid("json is not UTF-8"))?;
        let f = window_from_json(text).map_err(|e| invalid(e.to_string()))?;
        *out = Box::into_raw(Box::new(QhomWindow(f)));
        Ok(QhomStatus::Ok)
    })
}

/// # Safety
/// `w` must come from [`qhom_window_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qhom_window_free(w: *mut QhomWindow) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// # Safety
/// `w` must be a live window handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn qhom_window_dim(w: *const QhomWindow) -> usize {
    w.as_ref().map_or(0, |w| w.0.dim())
}

/// # Safety
/// `w` must be a live window handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn qhom_window_radius(w: *const QhomWindow) -> i64 {
    w.as_ref().map_or(0, |w| w.0.radius())
}

/// Checks `rank(f(x+y) - f(x) - f(y)) <= c` over the window. Returns
/// `QHOM_STATUS_OK` when the bound holds and `QHOM_STATUS_SEMANTIC` when it fails; in both
/// cases the measured maximum is written to `c_measured` and a witness pair
/// (or `0, 0` if none) to `witness_x`, `witness_y`. Witness pointers may be
/// null.
///
/// # Safety
/// `w` must be a live window handle; `c_measured` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qhom_verify(
    w: *const QhomWindow,
    c: usize,
    c_measured: *mut usize,
    witness_x: *mut i64,
    witness_y: *mut i64,
) -> QhomStatus {
    guard(|| {
        let w = deref(w, "window")?;
        let c_out = out_ref(c_measured, "c_measured")?;
        let report = verify_direct(&w.0, c);
        *c_out = report.c_measured;
        let (x, y) = report.witness.unwrap_or((0, 0));
        if let Some(wx) = witness_x.as_mut() {
            *wx = x;
        }
        if let Some(wy) = witness_y.as_mut() {
            *wy = y;
        }
        if report.satisfied {
            Ok(QhomStatus::Ok)
        } else {
            Err(Failure(
                QhomStatus::Semantic,
                format!(
                    "defect rank {} at ({x}, {y}) exceeds {c}",
                    report.c_measured
                ),
            ))
        }
    })
}

/// Builds an approximating homomorphism with a rank certificate.
///
/// # Safety
/// `w` must be a live window handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qhom_approximate(
    w: *const QhomWindow,
    out: *mut *mut QhomCertificate,
) -> QhomStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let w = deref(w, "window")?;
        let cert = approximate(&w.0)?;
        *out = Box::into_raw(Box::new(QhomCertificate(cert)));
        Ok(QhomStatus::Ok)
    })
}

/// # Safety
/// `c` must come from [`qhom_approximate`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qhom_certificate_free(c: *mut QhomCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// `max_x rank(f(x) - xA)`.
///
/// # Safety
/// `c` must be a live certificate handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn qhom_certificate_max_rank(c: *const QhomCertificate) -> usize {
    c.as_ref().map_or(0, |c| c.0.max_rank)
}

/// Certificate JSON, to be released with [`qhom_string_free`].
///
/// # Safety
/// `c` must be a live certificate handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qhom_certificate_to_json(
    c: *const QhomCertificate,
    out: *mut *mut c_char,
) -> QhomStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let c = deref(c, "certificate")?;
        *out = into_c_string(certificate_to_json(&c.0))?;
        Ok(QhomStatus::Ok)
    })
}

/// Structure detection on the normalized delta sequence. The finding is
/// written as JSON even when it is Inconclusive (status `QHOM_STATUS_INCONCLUSIVE`).
///
/// # Safety
/// `w` must be a live window handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qhom_detect_json(
    w: *const QhomWindow,
    out: *mut *mut c_char,
) -> QhomStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let w = deref(w, "window")?;
        let (g, _) = normalize(&w.0);
        let finding = detect_structure(&delta(&g), Verification::Check)?;
        let json = serde_json::to_string(&finding)
            .map_err(|e| Failure(QhomStatus::Internal, e.to_string()))?;
        *out = into_c_string(json)?;
        Ok(match finding.kind {
            FindingKind::Degenerate | FindingKind::Structured => QhomStatus::Ok,
            FindingKind::Inconclusive => {
                set_error(format!(
                    "window N = {} needs N >= {}",
                    finding.window_n,
                    finding.required_n.unwrap_or_default()
                ));
                QhomStatus::Inconclusive
            }
            FindingKind::NotQuasihom => {
                set_error("window is not a 1-quasihomomorphism");
                QhomStatus::Semantic
            }
        })
    })
}

/// Whether `x ~ y` under the equivalence generated by the two reflections
/// of periods `p` and `q` (`2 <= q < p`).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qhom_equiv_related(
    x: i64,
    y: i64,
    p: i64,
    q: i64,
    out: *mut bool,
) -> QhomStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = qhom::apap::equiv_related(x, y, p, q).map_err(|e| invalid(e.to_string()))?;
        Ok(QhomStatus::Ok)
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qhom_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

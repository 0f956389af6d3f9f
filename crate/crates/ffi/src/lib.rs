//! C ABI over the core library.
//!
//! Models live behind an opaque [`CtxModel`] handle. Every function returns
//! a [`CtxStatus`]; results come back as NUL-terminated JSON strings owned by
//! the library and released with [`ctxhier_string_free`]. The message of the
//! last failure on the calling thread is available from
//! [`ctxhier_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ctxhier_core::classifier::Tier;
use ctxhier_core::dutch_book::find_dutch_book;
use ctxhier_core::model::EmpiricalModel;
use ctxhier_core::violation::theorem1_witness;
use ctxhier_core::workbench::io::{self, Document};
use ctxhier_core::workbench::quantum::{quantum_to_empirical, SnapSettings};
use ctxhier_core::workbench::{catalog, report};
use ctxhier_core::wps::build_combinatorial_rep;
use ctxhier_core::Error;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CtxStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Malformed document or unknown name.
    Schema = 3,
    /// The input is well formed but fails a check (for example no-signaling).
    Validation = 4,
    CapExceeded = 5,
    /// The requested object does not exist, such as a witness for a tier the
    /// model does not reach.
    NotApplicable = 6,
    Internal = 7,
    Panic = 8,
}

/// An empirical model.
pub struct CtxModel {
    model: EmpiricalModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> CtxStatus {
    match e {
        Error::CapExceeded { .. } => CtxStatus::CapExceeded,
        Error::Schema { .. } | Error::Io(_) => CtxStatus::Schema,
        Error::TierMismatch { .. } => CtxStatus::NotApplicable,
        Error::Internal(_) => CtxStatus::Internal,
        _ => CtxStatus::Validation,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (CtxStatus, String)>) -> CtxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CtxStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("panic inside the library");
            CtxStatus::Panic
        }
    }
}

type FfiResult<T> = Result<T, (CtxStatus, String)>;

fn core<T>(r: ctxhier_core::Result<T>) -> FfiResult<T> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

unsafe fn read_str<'a>(p: *const c_char) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err((CtxStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CtxStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

unsafe fn write_string(out: *mut *mut c_char, text: String) -> FfiResult<()> {
    let c = CString::new(text).map_err(|_| (CtxStatus::Internal, "output contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn check_out<T>(out: *mut T) -> FfiResult<()> {
    if out.is_null() {
        Err((CtxStatus::NullArgument, "null output pointer".into()))
    } else {
        Ok(())
    }
}

unsafe fn model_ref<'a>(m: *const CtxModel) -> FfiResult<&'a CtxModel> {
    m.as_ref()
        .ok_or_else(|| (CtxStatus::NullArgument, "null model handle".into()))
}

fn boxed(model: EmpiricalModel) -> *mut CtxModel {
    Box::into_raw(Box::new(CtxModel { model }))
}

/// Message of the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ctxhier_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ctxhier_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Frees a model handle. Null is ignored.
///
/// # Safety
/// `m` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ctxhier_model_free(m: *mut CtxModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Loads a built-in model by name.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ctxhier_model_from_catalog(
    name: *const c_char,
    out: *mut *mut CtxModel,
) -> CtxStatus {
    guard(|| {
        check_out(out)?;
        let name = read_str(name)?;
        let entry = catalog::entry(name).map_err(|e| (CtxStatus::Schema, e.to_string()))?;
        *out = boxed(entry.model);
        Ok(())
    })
}

/// Parses a model document, or a quantum experiment document converted with
/// the default snapping settings.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ctxhier_model_from_json(
    json: *const c_char,
    out: *mut *mut CtxModel,
) -> CtxStatus {
    guard(|| {
        check_out(out)?;
        let model = match core(io::load(read_str(json)?))? {
            Document::Model(m) => m,
            Document::Quantum(q) => core(quantum_to_empirical(&q, SnapSettings::default()))?,
            other => {
                return Err((
                    CtxStatus::Schema,
                    format!("expected a model, found {}", other.kind()),
                ))
            }
        };
        *out = boxed(model);
        Ok(())
    })
}

/// The model as a model document.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ctxhier_model_to_json(
    m: *const CtxModel,
    out: *mut *mut c_char,
) -> CtxStatus {
    guard(|| {
        check_out(out)?;
        let m = model_ref(m)?;
        write_string(out, io::model_to_json(&m.model))
    })
}

/// Tier verdict with the representation-side and betting-side rows, as JSON.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ctxhier_classify(m: *const CtxModel, out: *mut *mut c_char) -> CtxStatus {
    guard(|| {
        check_out(out)?;
        let m = model_ref(m)?;
        let h = core(report::hierarchy_report(&m.model))?;
        write_string(out, h.to_json("model"))
    })
}

/// Witness report for `tier` (`strong`, `logical` or `probabilistic`).
///
/// # Safety
/// `m` must be a live handle, `tier` a NUL-terminated string and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ctxhier_witness(
    m: *const CtxModel,
    tier: *const c_char,
    out: *mut *mut c_char,
) -> CtxStatus {
    guard(|| {
        check_out(out)?;
        let m = model_ref(m)?;
        let t = read_str(tier)?;
        let tier =
            Tier::parse(t).ok_or_else(|| (CtxStatus::Schema, format!("unknown tier `{t}`")))?;
        let r = core(build_combinatorial_rep(&m.model))?;
        let w = core(theorem1_witness(&r, tier))?;
        write_string(
            out,
            io::save(&Document::WitnessReport {
                model: m.model.clone(),
                witness: w,
            }),
        )
    })
}

/// Dutch Book certificate document, or `null` when none exists.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ctxhier_dutch_book(
    m: *const CtxModel,
    out: *mut *mut c_char,
) -> CtxStatus {
    guard(|| {
        check_out(out)?;
        let m = model_ref(m)?;
        let r = core(build_combinatorial_rep(&m.model))?;
        let text = match core(find_dutch_book(&r))? {
            Some(c) => io::save(&Document::Certificate {
                model: m.model.clone(),
                certificate: c,
            }),
            None => "null".into(),
        };
        write_string(out, text)
    })
}

/// Re-checks any document. `valid` receives the outcome of the check; a
/// malformed document is reported through the status instead.
///
/// # Safety
/// `json` must be a NUL-terminated string and `valid` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ctxhier_verify(json: *const c_char, valid: *mut bool) -> CtxStatus {
    guard(|| {
        check_out(valid)?;
        let doc = core(io::load(read_str(json)?))?;
        let (ok, what) = core(io::verify_document(&doc, SnapSettings::default()))?;
        if !ok {
            set_error(&format!("check failed: {what}"));
        }
        *valid = ok;
        Ok(())
    })
}

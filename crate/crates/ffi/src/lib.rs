//! C interface to `epl`. Models and formulas are opaque handles owned by
//! the caller and released with the matching `_free` function. Every
//! function returns an [`EplStatus`]; on failure a message is available
//! from [`epl_last_error`] until the next call on the same thread.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use epl::kripke::{to_dot, DotStyle};
use epl::normalform::decide_single_agent;
use epl::scenarios::{build_scenario, verify_scenario};
use epl::semantics::{believed_update_pointed, eval, truthful_update};
use epl::truelie::{is_believable_true_lie, Method};
use epl::{CheckMode, Error, Formula, FrameClass, PointedModel, Sigma};

/// Opaque pointed Kripke model.
pub struct EplModel(PointedModel);

/// Opaque formula.
pub struct EplFormula(Formula);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EplStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    Model = 4,
    /// An announcement or action precondition is false at the point.
    Precondition = 5,
    Unsupported = 6,
    InvalidArgument = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EplFrameClass {
    K = 0,
    K45 = 1,
    Kd45 = 2,
    S5 = 3,
}

impl From<EplFrameClass> for FrameClass {
    fn from(c: EplFrameClass) -> Self {
        match c {
            EplFrameClass::K => FrameClass::K,
            EplFrameClass::K45 => FrameClass::K45,
            EplFrameClass::Kd45 => FrameClass::KD45,
            EplFrameClass::S5 => FrameClass::S5,
        }
    }
}

fn status_of(e: &Error) -> EplStatus {
    match e {
        Error::Syntax { .. } | Error::UnknownActionFile { .. } => EplStatus::Syntax,
        Error::UndeclaredAgent(_)
        | Error::AgentMismatch(_)
        | Error::MalformedModel(_)
        | Error::UnknownState(_)
        | Error::NotK45(_)
        | Error::NotSimplifiable(_)
        | Error::Json(_) => EplStatus::Model,
        Error::AnnouncementFalseAtPoint | Error::PreconditionFailedAtPoint => {
            EplStatus::Precondition
        }
        Error::UntranslatedDynamicOperator
        | Error::UnsupportedNesting
        | Error::UnsupportedOperator(_)
        | Error::MultiAgentFormula(_)
        | Error::TooManyAtoms { .. }
        | Error::UnsupportedClass(_) => EplStatus::Unsupported,
        Error::SigmaTooShort(_)
        | Error::InvalidSigma(_)
        | Error::BetaChoiceIncomplete(_)
        | Error::DisjunctOutOfRange(_)
        | Error::UnknownKind(_)
        | Error::UnknownScenario(_)
        | Error::ParamOutOfRange(_) => EplStatus::InvalidArgument,
        Error::Io(_) => EplStatus::Io,
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Fail {
    Status(EplStatus, String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Status(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> EplStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => EplStatus::Ok,
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal error");
            EplStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Status(EplStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(EplStatus::InvalidUtf8, "string is not UTF-8".into()))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail::Status(EplStatus::NullPointer, "null handle".into()))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Status(
            EplStatus::NullPointer,
            "null output pointer".into(),
        ));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s)
        .map_err(|_| Fail::Status(EplStatus::InvalidArgument, "output has NUL".into()))?;
    put(out, c.into_raw())
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn epl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn epl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epl_formula_parse(
    src: *const c_char,
    out: *mut *mut EplFormula,
) -> EplStatus {
    guard(|| {
        let f = epl::parse_formula(text(src)?)?;
        put(out, Box::into_raw(Box::new(EplFormula(f))))
    })
}

/// Canonical text of a formula; free it with [`epl_string_free`].
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epl_formula_print(
    f: *const EplFormula,
    out: *mut *mut c_char,
) -> EplStatus {
    guard(|| put_string(out, epl::print_formula(&deref(f)?.0)))
}

/// # Safety
/// `f` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn epl_formula_free(f: *mut EplFormula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Reads a model in the JSON file format; the `point` field is required.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epl_model_from_json(
    json: *const c_char,
    out: *mut *mut EplModel,
) -> EplStatus {
    guard(|| {
        let pm = PointedModel::from_json(text(json)?)?;
        put(out, Box::into_raw(Box::new(EplModel(pm))))
    })
}

/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epl_model_to_json(m: *const EplModel, out: *mut *mut c_char) -> EplStatus {
    guard(|| put_string(out, deref(m)?.0.to_json()))
}

/// Number of states of the model.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epl_model_state_count(m: *const EplModel, out: *mut usize) -> EplStatus {
    guard(|| put(out, deref(m)?.0.model.len()))
}

/// # Safety
/// `m` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn epl_model_free(m: *mut EplModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Truth of `f` at the point of `m`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epl_eval(
    m: *const EplModel,
    f: *const EplFormula,
    out: *mut bool,
) -> EplStatus {
    guard(|| put(out, eval(&deref(m)?.0, &deref(f)?.0)?))
}

/// Believed announcement of `f` (arrow elimination) as a new model.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epl_believed_update(
    m: *const EplModel,
    f: *const EplFormula,
    out: *mut *mut EplModel,
) -> EplStatus {
    guard(|| {
        let pm = believed_update_pointed(&deref(m)?.0, &deref(f)?.0)?;
        put(out, Box::into_raw(Box::new(EplModel(pm))))
    })
}

/// Truthful announcement of `f` (state elimination); fails with
/// `EPL_STATUS_PRECONDITION` when `f` is false at the point.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epl_truthful_update(
    m: *const EplModel,
    f: *const EplFormula,
    out: *mut *mut EplModel,
) -> EplStatus {
    guard(|| {
        let pm = truthful_update(&deref(m)?.0, &deref(f)?.0)?;
        put(out, Box::into_raw(Box::new(EplModel(pm))))
    })
}

/// Graphviz text; `simplified` draws K45 clusters compactly.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epl_model_to_dot(
    m: *const EplModel,
    simplified: bool,
    out: *mut *mut c_char,
) -> EplStatus {
    guard(|| {
        let style = if simplified {
            DotStyle::Simplified
        } else {
            DotStyle::Full
        };
        put_string(out, to_dot(&deref(m)?.0, style)?)
    })
}

/// Validity (`valid` true) or satisfiability of a single-agent formula over
/// K45 or KD45.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epl_decide(
    f: *const EplFormula,
    class: EplFrameClass,
    valid: bool,
    out: *mut bool,
) -> EplStatus {
    guard(|| {
        let mode = if valid {
            CheckMode::Valid
        } else {
            CheckMode::Satisfiable
        };
        put(
            out,
            decide_single_agent(&deref(f)?.0, class.into(), mode)?.holds,
        )
    })
}

/// Validity of the check formula for the bit string `sigma`.
///
/// # Safety
/// `f` must be a live handle, `sigma` a NUL-terminated string, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn epl_sigma_valid(
    f: *const EplFormula,
    sigma: *const c_char,
    class: EplFrameClass,
    believable: bool,
    out: *mut bool,
) -> EplStatus {
    guard(|| {
        let sigma = Sigma::parse(text(sigma)?)?;
        let v = epl::normalform::sigma_valid_single_agent(
            &deref(f)?.0,
            &sigma,
            class.into(),
            believable,
        )?;
        put(out, v)
    })
}

/// Whether `f` is a believable true lie on KD45, by the lying-form search
/// (`syntactic`) or by model enumeration.
///
/// # Safety
/// `f` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn epl_is_believable_true_lie(
    f: *const EplFormula,
    syntactic: bool,
    out: *mut bool,
) -> EplStatus {
    guard(|| {
        let method = if syntactic {
            Method::Syntactic
        } else {
            Method::Semantic
        };
        put(out, is_believable_true_lie(&deref(f)?.0, method)?)
    })
}

/// Builds and verifies a bundled scenario and returns the report as JSON.
/// `params_json` is null or a JSON object of string values.
///
/// # Safety
/// `name` must be a NUL-terminated string, `params_json` one or null, and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn epl_scenario_run_json(
    name: *const c_char,
    params_json: *const c_char,
    out: *mut *mut c_char,
) -> EplStatus {
    guard(|| {
        let params: BTreeMap<String, String> = if params_json.is_null() {
            BTreeMap::new()
        } else {
            serde_json::from_str(text(params_json)?).map_err(Error::from)?
        };
        let report = verify_scenario(&build_scenario(text(name)?, &params)?);
        put_string(out, serde_json::to_string(&report).map_err(Error::from)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_error_has_a_status() {
        assert_eq!(
            status_of(&Error::AnnouncementFalseAtPoint),
            EplStatus::Precondition
        );
        assert_eq!(status_of(&Error::Io("x".into())), EplStatus::Io);
        assert_eq!(
            status_of(&Error::Syntax {
                line: 1,
                column: 1,
                message: String::new()
            }),
            EplStatus::Syntax
        );
    }
}

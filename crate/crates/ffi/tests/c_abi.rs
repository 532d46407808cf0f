use std::ffi::{c_char, CStr, CString};
use std::ptr;

use epl_ffi::*;

const TWO_STATE: &str = r#"{
  "agents": ["a"],
  "states": ["s", "t"],
  "rel": {"a": [["s", "t"], ["t", "t"]]},
  "val": {"t": ["p"]},
  "point": "s"
}"#;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    epl_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(epl_last_error())
        .to_str()
        .unwrap()
        .to_owned()
}

unsafe fn formula(src: &str) -> *mut EplFormula {
    let mut f = ptr::null_mut();
    assert_eq!(epl_formula_parse(cstr(src).as_ptr(), &mut f), EplStatus::Ok);
    f
}

unsafe fn model(json: &str) -> *mut EplModel {
    let mut m = ptr::null_mut();
    assert_eq!(
        epl_model_from_json(cstr(json).as_ptr(), &mut m),
        EplStatus::Ok,
        "{}",
        last_error()
    );
    m
}

#[test]
fn parse_print_round_trip() {
    unsafe {
        let f = formula("B{a} (p -> q)");
        let mut s = ptr::null_mut();
        assert_eq!(epl_formula_print(f, &mut s), EplStatus::Ok);
        assert_eq!(take(s), "B{a} (p -> q)");
        epl_formula_free(f);
    }
}

#[test]
fn syntax_error_sets_message() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(
            epl_formula_parse(cstr("p &").as_ptr(), &mut f),
            EplStatus::Syntax
        );
        assert!(f.is_null());
        assert!(last_error().contains("line 1"));
        let g = formula("p");
        assert_eq!(last_error(), "");
        epl_formula_free(g);
    }
}

#[test]
fn null_arguments_are_reported() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(
            epl_formula_parse(ptr::null(), &mut f),
            EplStatus::NullPointer
        );
        let mut b = false;
        assert_eq!(
            epl_eval(ptr::null(), ptr::null(), &mut b),
            EplStatus::NullPointer
        );
        epl_formula_free(ptr::null_mut());
        epl_model_free(ptr::null_mut());
        epl_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_utf8_is_rejected() {
    unsafe {
        let bytes = [0xffu8, 0];
        let mut f = ptr::null_mut();
        assert_eq!(
            epl_formula_parse(bytes.as_ptr().cast(), &mut f),
            EplStatus::InvalidUtf8
        );
    }
}

#[test]
fn eval_and_updates() {
    unsafe {
        let m = model(TWO_STATE);
        let bp = formula("B{a} p");
        let p = formula("p");
        let mut b = false;
        assert_eq!(epl_eval(m, bp, &mut b), EplStatus::Ok);
        assert!(b);
        assert_eq!(epl_eval(m, p, &mut b), EplStatus::Ok);
        assert!(!b);

        // p is false at s, so the truthful announcement fails
        let mut out = ptr::null_mut();
        assert_eq!(epl_truthful_update(m, p, &mut out), EplStatus::Precondition);
        assert!(out.is_null());

        let notp = formula("~p");
        assert_eq!(epl_believed_update(m, notp, &mut out), EplStatus::Ok);
        assert_eq!(epl_eval(out, bp, &mut b), EplStatus::Ok);
        assert!(b, "s loses its only arrow, so B p holds vacuously");
        let mut n = 0usize;
        assert_eq!(epl_model_state_count(out, &mut n), EplStatus::Ok);
        assert_eq!(n, 2);
        epl_model_free(out);

        assert_eq!(epl_believed_update(m, p, &mut out), EplStatus::Ok);
        assert_eq!(epl_eval(out, bp, &mut b), EplStatus::Ok);
        assert!(b);
        epl_model_free(out);

        for f in [bp, p, notp] {
            epl_formula_free(f);
        }
        epl_model_free(m);
    }
}

#[test]
fn model_json_round_trip() {
    unsafe {
        let m = model(TWO_STATE);
        let mut s = ptr::null_mut();
        assert_eq!(epl_model_to_json(m, &mut s), EplStatus::Ok);
        let json = take(s);
        let m2 = model(&json);
        let f = formula("B{a} B{a} p & ~p");
        let (mut x, mut y) = (false, false);
        epl_eval(m, f, &mut x);
        epl_eval(m2, f, &mut y);
        assert_eq!(x, y);
        epl_formula_free(f);
        epl_model_free(m);
        epl_model_free(m2);
    }
}

#[test]
fn malformed_model_is_model_error() {
    unsafe {
        let mut m = ptr::null_mut();
        let bad =
            cstr(r#"{"agents": ["a"], "states": ["s"], "rel": {"a": [["s", "x"]]}, "point": "s"}"#);
        assert_eq!(epl_model_from_json(bad.as_ptr(), &mut m), EplStatus::Model);
        assert!(last_error().contains("x"));
    }
}

#[test]
fn dot_output() {
    unsafe {
        let m = model(TWO_STATE);
        let mut s = ptr::null_mut();
        assert_eq!(epl_model_to_dot(m, false, &mut s), EplStatus::Ok);
        assert!(take(s).starts_with("digraph"));
        epl_model_free(m);
    }
}

#[test]
fn decisions() {
    unsafe {
        let f = formula("B p -> B B p");
        let mut b = false;
        assert_eq!(
            epl_decide(f, EplFrameClass::K45, true, &mut b),
            EplStatus::Ok
        );
        assert!(b);
        assert_eq!(
            epl_decide(f, EplFrameClass::K, true, &mut b),
            EplStatus::Unsupported
        );
        epl_formula_free(f);

        let d = formula("B p & B ~p");
        assert_eq!(
            epl_decide(d, EplFrameClass::K45, false, &mut b),
            EplStatus::Ok
        );
        assert!(b);
        assert_eq!(
            epl_decide(d, EplFrameClass::Kd45, false, &mut b),
            EplStatus::Ok
        );
        assert!(!b);
        epl_formula_free(d);
    }
}

#[test]
fn sigma_validity_and_true_lies() {
    unsafe {
        let f = formula("p | B p");
        let mut b = true;
        assert_eq!(
            epl_sigma_valid(f, cstr("11").as_ptr(), EplFrameClass::Kd45, false, &mut b),
            EplStatus::Ok
        );
        assert_eq!(
            epl_sigma_valid(f, cstr("1").as_ptr(), EplFrameClass::Kd45, false, &mut b),
            EplStatus::InvalidArgument
        );
        for syntactic in [true, false] {
            assert_eq!(
                epl_is_believable_true_lie(f, syntactic, &mut b),
                EplStatus::Ok
            );
            assert!(b);
        }
        epl_formula_free(f);

        let g = formula("p & B p");
        for syntactic in [true, false] {
            assert_eq!(
                epl_is_believable_true_lie(g, syntactic, &mut b),
                EplStatus::Ok
            );
            assert!(!b);
        }
        epl_formula_free(g);
    }
}

#[test]
fn scenario_report() {
    unsafe {
        let mut s = ptr::null_mut();
        let status = epl_scenario_run_json(
            cstr("muddy").as_ptr(),
            cstr(r#"{"n": "3", "k": "2"}"#).as_ptr(),
            &mut s,
        );
        assert_eq!(status, EplStatus::Ok, "{}", last_error());
        let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        let rows = v["results"].as_array().unwrap();
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| r["pass"] == true));

        assert_eq!(
            epl_scenario_run_json(cstr("nope").as_ptr(), ptr::null(), &mut s),
            EplStatus::InvalidArgument
        );
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/epl.h")).unwrap();
    for name in [
        "epl_last_error",
        "epl_string_free",
        "epl_formula_parse",
        "epl_formula_print",
        "epl_formula_free",
        "epl_model_from_json",
        "epl_model_to_json",
        "epl_model_state_count",
        "epl_model_free",
        "epl_eval",
        "epl_believed_update",
        "epl_truthful_update",
        "epl_model_to_dot",
        "epl_decide",
        "epl_sigma_valid",
        "epl_is_believable_true_lie",
        "epl_scenario_run_json",
        "typedef struct EplModel EplModel",
        "EPL_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

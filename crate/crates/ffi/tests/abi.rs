use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use ctxhier_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { ctxhier_string_free(s) };
    text
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ctxhier_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

fn catalog_model(name: &str) -> *mut CtxModel {
    let name = CString::new(name).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { ctxhier_model_from_catalog(name.as_ptr(), &mut m) },
        CtxStatus::Ok
    );
    m
}

#[test]
fn classify_bell_through_the_abi() {
    let m = catalog_model("bell");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ctxhier_classify(m, &mut out) }, CtxStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["tier"], "probabilistic");
    assert_eq!(v["dutch_bookable"], true);
    unsafe { ctxhier_model_free(m) };
}

#[test]
fn certificate_round_trips_and_verifies() {
    let m = catalog_model("pr-box");
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ctxhier_dutch_book(m, &mut out) }, CtxStatus::Ok);
    let doc = take(out);
    let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
    assert_eq!(v["stakes"].as_array().unwrap().len(), 8);
    assert_eq!(v["loss_bound"], "1");

    let c = CString::new(doc.clone()).unwrap();
    let mut valid = false;
    assert_eq!(
        unsafe { ctxhier_verify(c.as_ptr(), &mut valid) },
        CtxStatus::Ok
    );
    assert!(valid);

    // Halving every stake keeps a sure loss but not the claimed bound.
    let tampered = doc.replace("\"stake\": \"-1\"", "\"stake\": \"-1/2\"");
    let c = CString::new(tampered).unwrap();
    assert_eq!(
        unsafe { ctxhier_verify(c.as_ptr(), &mut valid) },
        CtxStatus::Ok
    );
    assert!(!valid);
    unsafe { ctxhier_model_free(m) };
}

#[test]
fn witness_and_model_json() {
    let m = catalog_model("hardy");
    let tier = CString::new("logical").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { ctxhier_witness(m, tier.as_ptr(), &mut out) },
        CtxStatus::Ok
    );
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["witness_kind"], "subadditivity");

    let strong = CString::new("strong").unwrap();
    assert_eq!(
        unsafe { ctxhier_witness(m, strong.as_ptr(), &mut out) },
        CtxStatus::NotApplicable
    );
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { ctxhier_model_to_json(m, &mut out) }, CtxStatus::Ok);
    let json = CString::new(take(out)).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(
        unsafe { ctxhier_model_from_json(json.as_ptr(), &mut back) },
        CtxStatus::Ok
    );
    unsafe {
        ctxhier_model_free(back);
        ctxhier_model_free(m);
    }
}

#[test]
fn errors_are_reported() {
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { ctxhier_model_from_catalog(ptr::null(), &mut m) },
        CtxStatus::NullArgument
    );
    let bad = CString::new("{\"schema_version\": 1, \"kind\": \"model\"}").unwrap();
    assert_eq!(
        unsafe { ctxhier_model_from_json(bad.as_ptr(), &mut m) },
        CtxStatus::Schema
    );
    assert!(last_error().contains("line 1"), "{}", last_error());
    let unknown = CString::new("nope").unwrap();
    assert_eq!(
        unsafe { ctxhier_model_from_catalog(unknown.as_ptr(), &mut m) },
        CtxStatus::Schema
    );
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { ctxhier_classify(ptr::null(), &mut out) },
        CtxStatus::NullArgument
    );
    unsafe {
        ctxhier_string_free(ptr::null_mut());
        ctxhier_model_free(ptr::null_mut());
    }
}

#[test]
fn header_is_valid_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/ctxhier.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in [
        "ctxhier_classify",
        "ctxhier_verify",
        "ctxhier_string_free",
        "CTX_STATUS_CAP_EXCEEDED",
    ] {
        assert!(text.contains(f), "{f}");
    }
    match Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", header])
        .status()
    {
        Ok(s) => assert!(s.success()),
        Err(_) => eprintln!("no C compiler found; syntax check skipped"),
    }
}

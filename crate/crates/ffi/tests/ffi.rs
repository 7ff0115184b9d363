use std::ffi::{c_char, CStr, CString};
use std::ptr;

use fano_lines_ffi::*;

fn fixture_path(id: &str) -> CString {
    CString::new(format!("{}/../../fixtures/{id}.json", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    fl_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(fl_last_error()).to_str().unwrap().to_string()
}

unsafe fn load(id: &str) -> *mut FlFixture {
    let mut h = ptr::null_mut();
    assert_eq!(fl_fixture_load(fixture_path(id).as_ptr(), &mut h), FlStatus::Ok);
    assert!(!h.is_null());
    h
}

#[test]
fn load_inspect_free() {
    unsafe {
        let h = load("FX-C1");
        let mut kind = FlKind::Nodal;
        assert_eq!(fl_fixture_kind(h, &mut kind), FlStatus::Ok);
        assert_eq!(kind, FlKind::CuspidalCyclic);
        let mut n = 0usize;
        assert_eq!(fl_fixture_point_count(h, &mut n), FlStatus::Ok);
        assert_eq!(n, 12);
        let mut s = ptr::null_mut();
        assert_eq!(fl_fixture_to_json(h, &mut s), FlStatus::Ok);
        let text = take(s);
        let committed = std::fs::read_to_string(fixture_path("FX-C1").to_str().unwrap()).unwrap();
        assert_eq!(text, committed);
        let mut h2 = ptr::null_mut();
        let c = CString::new(text).unwrap();
        assert_eq!(fl_fixture_from_json(c.as_ptr(), &mut h2), FlStatus::Ok);
        fl_fixture_free(h2);
        fl_fixture_free(h);
        fl_fixture_free(ptr::null_mut());
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(fl_fixture_from_json(ptr::null(), &mut h), FlStatus::NullPointer);
        let bad = CString::new(r#"{"kind":"nodal","q":7}"#).unwrap();
        assert_eq!(fl_fixture_from_json(bad.as_ptr(), &mut h), FlStatus::ParseError);
        assert!(last_error().contains("`q`"), "{}", last_error());
        let missing = CString::new("/nonexistent/fixture.json").unwrap();
        assert_eq!(fl_fixture_load(missing.as_ptr(), &mut h), FlStatus::InvalidArgument);
        let mut n = 0usize;
        assert_eq!(fl_fixture_point_count(ptr::null(), &mut n), FlStatus::NullPointer);
        let h = load("FX-N1");
        assert_eq!(last_error(), "");
        let mut s = ptr::null_mut();
        let suite = CString::new("everything").unwrap();
        assert_eq!(fl_run_suite(h, suite.as_ptr(), 0, 10, ptr::null(), &mut s), FlStatus::InvalidArgument);
        assert_eq!(fl_transversal_type(h, 99, &mut s), FlStatus::InvalidArgument);
        let scheme =
            CString::new(r#"{"variant":"reduced","points":[["0","1","0","0","0","0"],["0","0","1","0","0","0"]]}"#)
                .unwrap();
        assert_eq!(fl_phi(h, scheme.as_ptr(), &mut s), FlStatus::InvalidArgument);
        fl_fixture_free(h);
        let bad_utf8 = [0xffu8 as c_char, 0];
        assert_eq!(fl_fixture_from_json(bad_utf8.as_ptr(), &mut ptr::null_mut()), FlStatus::InvalidUtf8);
    }
}

#[test]
fn phi_roundtrip_through_the_abi() {
    unsafe {
        let h = load("FX-N1");
        let mut s = ptr::null_mut();
        assert_eq!(fl_fixture_to_json(h, &mut s), FlStatus::Ok);
        let fx: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        let pts = &fx["points"];
        let scheme = serde_json::json!({ "variant": "reduced", "points": [pts[0], pts[1]] }).to_string();
        let c = CString::new(scheme).unwrap();
        assert_eq!(fl_phi(h, c.as_ptr(), &mut s), FlStatus::Ok);
        let out: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(out["outcome"], "line");
        let line = CString::new(out["line"].to_string()).unwrap();
        assert_eq!(fl_phi_inverse(h, line.as_ptr(), &mut s), FlStatus::Ok);
        let back: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(back["outcome"], "scheme");
        // phi of the recovered scheme is the same line
        let again = CString::new(back["scheme"].to_string()).unwrap();
        assert_eq!(fl_phi(h, again.as_ptr(), &mut s), FlStatus::Ok);
        let out2: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(out2, out);
        assert_eq!(fl_transversal_type(h, 0, &mut s), FlStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(v["type"], "A1");
        fl_fixture_free(h);
    }
}

#[test]
fn suite_reports_through_the_abi() {
    unsafe {
        let h = load("FX-C1");
        let mut s = ptr::null_mut();
        let suite = CString::new("divisors").unwrap();
        assert_eq!(fl_run_suite(h, suite.as_ptr(), 0, 20, ptr::null(), &mut s), FlStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(report["schema"], "fano-lines-report/1");
        assert_eq!(report["summary"]["fail"], 0);
        let suite = CString::new("local").unwrap();
        assert_eq!(fl_run_suite(h, suite.as_ptr(), 0, 20, ptr::null(), &mut s), FlStatus::ChecksFailed);
        let report: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        let failing: Vec<&str> = report["checks"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|c| c["status"] == "fail")
            .map(|c| c["name"].as_str().unwrap())
            .collect();
        assert_eq!(failing, ["local.jacobian-sigma"]);
        fl_fixture_free(h);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(format!("{}/include/fano_lines.h", env!("CARGO_MANIFEST_DIR"))).unwrap();
    for sym in [
        "fl_last_error",
        "fl_version",
        "fl_fixture_from_json",
        "fl_fixture_load",
        "fl_fixture_free",
        "fl_fixture_kind",
        "fl_fixture_point_count",
        "fl_fixture_to_json",
        "fl_run_suite",
        "fl_phi",
        "fl_phi_inverse",
        "fl_transversal_type",
        "fl_string_free",
        "FL_STATUS_CHECKS_FAILED",
        "typedef struct FlFixture FlFixture",
    ] {
        assert!(header.contains(sym), "{sym}");
    }
    let v = unsafe { CStr::from_ptr(fl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let dir = format!("{}/include", env!("CARGO_MANIFEST_DIR"));
    let src = std::env::temp_dir().join("fano_lines_header_check.c");
    std::fs::write(&src, "#include \"fano_lines.h\"\nint main(void) { return fl_version() == 0; }\n").unwrap();
    match std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-I", &dir]).arg(&src).status() {
        Ok(st) => assert!(st.success()),
        Err(_) => eprintln!("cc not available; header compile check not run"),
    }
}

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use potline_ffi::*;

const WORKED_LCP: &str = r#"{"M": [["2","1"],["1","2"]], "q": ["-1","-1"]}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    potline_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(potline_last_error()).to_str().unwrap().to_string()
}

unsafe fn instance(problem: &str, json: &str) -> *mut PotlineInstance {
    let mut inst = ptr::null_mut();
    assert_eq!(potline_instance_from_json(c(problem).as_ptr(), c(json).as_ptr(), &mut inst), PotlineStatus::Ok);
    inst
}

#[test]
fn solve_and_verify_worked_lcp() {
    unsafe {
        let inst = instance("plcp", WORKED_LCP);
        let mut cert = ptr::null_mut();
        assert_eq!(potline_solve(inst, c("lemke").as_ptr(), 0, &mut cert), PotlineStatus::Ok);
        let json = take(cert);
        assert_eq!(json, r#"{"kind":"Q1","y":["1/3","1/3"]}"#);
        assert_eq!(potline_verify(inst, c(&json).as_ptr()), PotlineStatus::Ok);
        let tampered = r#"{"kind":"Q1","y":["1/3","1/2"]}"#;
        assert_eq!(potline_verify(inst, c(tampered).as_ptr()), PotlineStatus::Rejected);
        assert!(last_error().contains("complementarity y2w2"), "{}", last_error());
        potline_instance_free(inst);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut inst = ptr::null_mut();
        assert_eq!(potline_instance_from_json(ptr::null(), c("{}").as_ptr(), &mut inst), PotlineStatus::NullArgument);
        assert_eq!(potline_instance_from_json(c("plcp").as_ptr(), c("{").as_ptr(), &mut inst), PotlineStatus::Parse);
        assert!(inst.is_null());
        let lcp = instance("plcp", WORKED_LCP);
        let mut chain = ptr::null_mut();
        assert_eq!(potline_chain_build(lcp, c("uso:plcp").as_ptr(), &mut chain), PotlineStatus::BadChain);
        assert!(chain.is_null());
        let mut answer = ptr::null_mut();
        assert_eq!(potline_query(lcp, c("S 00").as_ptr(), &mut answer), PotlineStatus::Parse);
        let mut cert = ptr::null_mut();
        assert_eq!(potline_solve(lcp, c("aldous").as_ptr(), 0, &mut cert), PotlineStatus::Parse);
        let name = CStr::from_ptr(potline_status_name(PotlineStatus::BadChain));
        assert_eq!(name.to_str().unwrap(), "bad chain");
        potline_instance_free(lcp);
        potline_instance_free(ptr::null_mut());
        potline_chain_free(ptr::null_mut());
        potline_string_free(ptr::null_mut());
    }
}

#[test]
fn chain_queries_and_map_back() {
    unsafe {
        let lcp = instance("plcp", WORKED_LCP);
        let mut chain = ptr::null_mut();
        assert_eq!(potline_chain_build(lcp, c("plcp:uso:opdc").as_ptr(), &mut chain), PotlineStatus::Ok);
        let mut grid = ptr::null_mut();
        assert_eq!(potline_chain_target(chain, &mut grid), PotlineStatus::Ok);
        let mut answer = ptr::null_mut();
        assert_eq!(potline_query(grid, c("D 1 11").as_ptr(), &mut answer), PotlineStatus::Ok);
        assert_eq!(take(answer), "zero");
        let mut cert = ptr::null_mut();
        assert_eq!(potline_solve(grid, ptr::null(), 0, &mut cert), PotlineStatus::Ok);
        let grid_cert = take(cert);
        let mut back = ptr::null_mut();
        assert_eq!(potline_chain_map_back(chain, c(&grid_cert).as_ptr(), &mut back), PotlineStatus::Ok);
        let back = take(back);
        assert_eq!(potline_verify(lcp, c(&back).as_ptr()), PotlineStatus::Ok);
        assert!(back.contains("Q1"), "{back}");
        potline_instance_free(grid);
        potline_chain_free(chain);
        potline_instance_free(lcp);
    }
}

#[test]
fn generated_instances_solve() {
    unsafe {
        for kind in ["p-matrix-lcp", "uso", "contraction-circuit", "explicit-line", "multi-line", "opdc-grid"] {
            let (mut problem, mut json) = (ptr::null_mut(), ptr::null_mut());
            let size = if kind.ends_with("line") { 16 } else { 2 };
            let st = potline_generate(c(kind).as_ptr(), size, 3, false, &mut problem, &mut json);
            assert_eq!(st, PotlineStatus::Ok, "{kind}: {}", last_error());
            let (problem, json) = (take(problem), take(json));
            let inst = instance(&problem, &json);
            let mut cert = ptr::null_mut();
            assert_eq!(potline_solve(inst, ptr::null(), 1, &mut cert), PotlineStatus::Ok, "{kind}: {}", last_error());
            let cert = take(cert);
            assert_eq!(potline_verify(inst, c(&cert).as_ptr()), PotlineStatus::Ok, "{kind}");
            potline_instance_free(inst);
        }
        let mut json = ptr::null_mut();
        let st = potline_generate(c("no-such-kind").as_ptr(), 2, 0, false, ptr::null_mut(), &mut json);
        assert_eq!(st, PotlineStatus::Parse);
    }
}

#[test]
fn header_declares_api() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(root.join("include/potline.h")).unwrap();
    for name in [
        "potline_instance_from_json",
        "potline_solve",
        "potline_verify",
        "potline_query",
        "potline_chain_build",
        "potline_chain_map_back",
        "POTLINE_STATUS_BAD_CHAIN",
        "typedef struct PotlineInstance PotlineInstance",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

#[test]
fn c_program_links_against_static_library() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libpotline_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let out = std::env::temp_dir().join(format!("potline_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg(root.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains(r#""y":["1/3","1/3"]"#), "{stdout}");
    assert!(stdout.contains("V 0000 = 0"), "{stdout}");
}

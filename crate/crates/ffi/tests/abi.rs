use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use calisson_ffi::*;

const HEX1_ONE: &str = r#"{"region":{"type":"hexagon","n":1},"x2":[[0,0,0,"Z"]]}"#;
const HEX1_BOTH: &str = r#"{"region":{"type":"hexagon","n":1},"x2":[[0,0,0,"Z"],[1,1,0,"Z"]]}"#;

fn instance(json: &str) -> *mut CalissonInstance {
    let text = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe { calisson_instance_from_json(text.as_ptr(), &mut out) };
    assert_eq!(status, CalissonStatus::Ok);
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    let p = calisson_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn solve_and_inspect() {
    let inst = instance(HEX1_ONE);
    unsafe {
        assert_eq!(calisson_instance_triangle_count(inst), 6);
        let mut out = ptr::null_mut();
        assert_eq!(calisson_solve(inst, CALISSON_ALGO_BF, &mut out), CalissonStatus::Ok);
        assert_eq!(calisson_outcome_is_tiled(out), 1);
        assert_eq!(calisson_outcome_lozenge_count(out), 3);
        assert_eq!(calisson_outcome_check(inst, out), CalissonStatus::Ok);
        let json = calisson_outcome_to_json(out);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        calisson_string_free(json);
        assert!(text.contains(r#""status":"tiled""#));
        let svg = calisson_render_svg(inst, out);
        assert!(CStr::from_ptr(svg).to_str().unwrap().starts_with("<svg"));
        calisson_string_free(svg);
        calisson_outcome_free(out);
        calisson_instance_free(inst);
    }
}

#[test]
fn infeasible_outcome_carries_a_cycle() {
    let inst = instance(HEX1_BOTH);
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(calisson_solve(inst, CALISSON_ALGO_ADVANCING, &mut out), CalissonStatus::Infeasible);
        assert_eq!(calisson_outcome_is_tiled(out), 0);
        assert!(calisson_outcome_cycle_weight(out) < 0);
        assert_eq!(calisson_outcome_check(inst, out), CalissonStatus::Infeasible);
        calisson_outcome_free(out);
        calisson_instance_free(inst);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut inst = ptr::null_mut();
        let bad = CString::new("{not json").unwrap();
        assert_eq!(calisson_instance_from_json(bad.as_ptr(), &mut inst), CalissonStatus::ParseError);
        assert!(inst.is_null());
        assert!(last_error().contains("line 1"));

        let empty = CString::new("{}").unwrap();
        assert_eq!(calisson_instance_from_json(empty.as_ptr(), &mut inst), CalissonStatus::InvalidInstance);
        assert!(last_error().contains("missing-region"));

        assert_eq!(calisson_instance_from_json(ptr::null(), &mut inst), CalissonStatus::NullPointer);

        let hex = instance(HEX1_ONE);
        let mut out = ptr::null_mut();
        assert_eq!(calisson_solve(hex, 99, &mut out), CalissonStatus::Unsupported);
        assert_eq!(calisson_solve(hex, CALISSON_ALGO_THURSTON, &mut out), CalissonStatus::Unsupported);
        assert_eq!(calisson_solve(hex, CALISSON_ALGO_INFINITE, &mut out), CalissonStatus::Unsupported);
        assert!(out.is_null());
        assert_eq!(calisson_solve(ptr::null(), CALISSON_ALGO_BF, &mut out), CalissonStatus::NullPointer);
        calisson_instance_free(hex);

        // Freeing NULL is a no-op.
        calisson_instance_free(ptr::null_mut());
        calisson_outcome_free(ptr::null_mut());
        calisson_string_free(ptr::null_mut());
    }
}

#[test]
fn infinite_window() {
    let inst = instance(r#"{"region":{"type":"infinite"},"x2":[[0,0,0,"Z"]]}"#);
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(calisson_solve_window(inst, 0, 0, 0, 10, &mut out), CalissonStatus::Ok);
        assert_eq!(calisson_outcome_check(inst, out), CalissonStatus::Ok);
        calisson_outcome_free(out);
        calisson_instance_free(inst);
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(calisson_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/calisson.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "calisson_instance_from_json",
        "calisson_solve",
        "calisson_solve_window",
        "calisson_outcome_to_json",
        "calisson_outcome_free",
        "calisson_string_free",
        "CALISSON_STATUS_INFEASIBLE",
        "typedef struct CalissonInstance CalissonInstance",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
}

/// Compile the header with the system C compiler, if there is one.
#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"calisson.h\"\nint main(void) { CalissonInstance *i = 0; \
         return calisson_instance_from_json(\"{}\", &i) == CALISSON_STATUS_INVALID_INSTANCE ? 0 : 1; }\n",
    )
    .unwrap();
    let status = Command::new(cc)
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "clang", "gcc"] {
        if Command::new(cc).arg("--version").output().is_ok() {
            return Ok(cc);
        }
    }
    Err(())
}

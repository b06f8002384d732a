use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use rhmember_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rhm_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn graph_handles() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(rhm_graph_fold(c("a,b").as_ptr(), c("a*a,a*b").as_ptr(), &mut g), RhmStatus::Ok);
        assert_eq!(rhm_graph_num_vertices(g), 2);
        assert_eq!(rhm_graph_num_edges(g), 3);
        assert_eq!(rhm_graph_rank(g), 2);
        assert_eq!(rhm_graph_index(g), -1);
        let mut inside = false;
        assert_eq!(rhm_graph_contains(g, c("a*b^-1*a").as_ptr(), &mut inside), RhmStatus::Ok);
        assert!(!inside);
        assert_eq!(rhm_graph_contains(g, c("b^-1*a^-1*a*a").as_ptr(), &mut inside), RhmStatus::Ok);
        assert!(inside);
        let mut json = ptr::null_mut();
        assert_eq!(rhm_graph_to_json(g, &mut json), RhmStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        rhm_string_free(json);
        assert!(text.contains("\"vertices\":2"));
        rhm_graph_free(g);

        let mut g = ptr::null_mut();
        assert_eq!(rhm_graph_fold(c("a").as_ptr(), c("a*a").as_ptr(), &mut g), RhmStatus::Ok);
        assert_eq!(rhm_graph_index(g), 2);
        rhm_graph_free(g);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(rhm_graph_fold(c("a,b").as_ptr(), c("a*z").as_ptr(), &mut g), RhmStatus::Parse);
        assert!(g.is_null());
        assert!(last_error().contains("z"));
        assert_eq!(rhm_graph_fold(ptr::null(), c("a").as_ptr(), &mut g), RhmStatus::NullPointer);
        assert_eq!(rhm_graph_fold(c("a").as_ptr(), c("a").as_ptr(), ptr::null_mut()), RhmStatus::NullPointer);
        let mut s = ptr::null_mut();
        assert_eq!(rhm_structure_load(c("/no/such/bundle").as_ptr(), &mut s), RhmStatus::InvalidStructure);
        rhm_graph_free(ptr::null_mut());
        rhm_string_free(ptr::null_mut());
    }
}

#[test]
fn structures_and_membership() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(rhm_structure_load(c("builtin:abelian(a,b)").as_ptr(), &mut s), RhmStatus::Ok);
        let mut lg = ptr::null_mut();
        let mut certified = false;
        assert_eq!(rhm_lgraph_compute(s, c("a*a,b").as_ptr(), 20, &mut lg, &mut certified), RhmStatus::Ok);
        assert!(certified);
        let mut inside = true;
        assert_eq!(rhm_lgraph_contains(lg, c("a").as_ptr(), &mut inside), RhmStatus::Ok);
        assert!(!inside);
        assert_eq!(rhm_lgraph_contains(lg, c("b*a^2").as_ptr(), &mut inside), RhmStatus::Ok);
        assert!(inside);
        rhm_lgraph_free(lg);

        assert_eq!(rhm_lgraph_compute(s, c("a*a*b").as_ptr(), 5, &mut lg, &mut certified), RhmStatus::Ok);
        assert!(!certified);
        assert_eq!(rhm_lgraph_contains(lg, c("a").as_ptr(), &mut inside), RhmStatus::Uncertified);
        rhm_lgraph_free(lg);

        let mut member = false;
        assert_eq!(rhm_oracle(s, c("a*a,b").as_ptr(), c("a^4*b").as_ptr(), &mut member), RhmStatus::Ok);
        assert!(member);
        rhm_structure_free(s);
    }
}

#[test]
fn relative_membership() {
    let pres = r#"{"alphabet":["a","b","t"],"relators":["a*b*a^-1*b^-1"],
        "peripherals":[{"name":"P1","rank":2,"alphabet":["a","b"],"embedding":{"a":"a","b":"b"}}]}"#;
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(rhm_structure_load(c("builtin:abelian(a,b)*free(t)").as_ptr(), &mut s), RhmStatus::Ok);
        let mut inst = ptr::null_mut();
        assert_eq!(rhm_instance_new(c(pres).as_ptr(), s, &mut inst), RhmStatus::Ok);
        // The instance keeps its own reference to the structure.
        rhm_structure_free(s);
        let mut v = RhmVerdict::BudgetExhausted;
        let mut report = ptr::null_mut();
        let st = rhm_member(inst, c("a").as_ptr(), c("b").as_ptr(), 20, RhmSchedule::Diag, &mut v, &mut report);
        assert_eq!(st, RhmStatus::Ok);
        assert_eq!(v, RhmVerdict::NonMember);
        let r: serde_json::Value = serde_json::from_str(CStr::from_ptr(report).to_str().unwrap()).unwrap();
        rhm_string_free(report);
        assert_eq!(r["verdict"], "non_member");
        assert!(r["certificate"]["graph"].is_object());
        let st = rhm_member(inst, c("a").as_ptr(), c("a^-3").as_ptr(), 20, RhmSchedule::Alt, &mut v, ptr::null_mut());
        assert_eq!(st, RhmStatus::Ok);
        assert_eq!(v, RhmVerdict::Member);
        let st = rhm_member(inst, c("a").as_ptr(), c("b").as_ptr(), 0, RhmSchedule::Diag, &mut v, ptr::null_mut());
        assert_eq!(st, RhmStatus::Ok);
        assert_eq!(v, RhmVerdict::BudgetExhausted);
        rhm_instance_free(inst);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/rhmember.h")).unwrap();
    for name in [
        "rhm_last_error",
        "rhm_string_free",
        "rhm_graph_fold",
        "rhm_graph_index",
        "rhm_structure_load",
        "rhm_lgraph_compute",
        "rhm_instance_new",
        "rhm_member",
        "typedef struct RhmGraph RhmGraph",
        "RHM_STATUS_PANIC = 5",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Compiles and runs the C smoke test against the static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // `cargo test` builds only the rlib, so build the static library into a
    // separate target directory to stay clear of the outer build lock.
    let exe = std::env::current_exe().unwrap();
    let target = exe.ancestors().nth(3).unwrap().join("c-smoke");
    let status = Command::new(env!("CARGO"))
        .args(["build", "--quiet", "--lib", "--manifest-path"])
        .arg(manifest.join("Cargo.toml"))
        .arg("--target-dir")
        .arg(&target)
        .status()
        .unwrap();
    assert!(status.success());
    let lib = target.join("debug/librhmember_ffi.a");
    let out = std::env::temp_dir().join(format!("rhm_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}

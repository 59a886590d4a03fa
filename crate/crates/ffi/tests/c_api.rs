use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use budgetwalk_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(bw_last_error()) }.to_string_lossy().into_owned()
}

fn union_graph(n: usize, seed: u64) -> *mut BwGraph {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { bw_graph_generate(BW_MODEL_UNION, n, 1, 2, seed, &mut g) }, BW_OK);
    assert!(!g.is_null());
    g
}

#[test]
fn generate_query_free() {
    let g = union_graph(100, 3);
    unsafe {
        assert_eq!(bw_graph_n(g), 100);
        assert_eq!(bw_graph_red_degree(g), 1);
        assert_eq!(bw_graph_blue_degree(g), 2);
        bw_graph_free(g);
        bw_graph_free(ptr::null_mut());
        assert_eq!(bw_graph_n(ptr::null()), 0);
    }
}

#[test]
fn parity_error_sets_message() {
    let mut g = ptr::null_mut();
    let code = unsafe { bw_graph_generate(BW_MODEL_UNION, 5, 1, 2, 0, &mut g) };
    assert_eq!(code, BW_INVALID_PARAMETER);
    assert!(g.is_null());
    assert!(last_error().contains("n·r must be even"), "{}", last_error());
    let code = unsafe { bw_graph_generate(42, 10, 1, 2, 0, &mut g) };
    assert_eq!(code, BW_INVALID_PARAMETER);
    assert_eq!(unsafe { bw_graph_generate(BW_MODEL_UNION, 10, 1, 2, 0, ptr::null_mut()) }, BW_NULL_POINTER);
}

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("g.txt").to_str().unwrap()).unwrap();
    let g = union_graph(40, 9);
    unsafe {
        assert_eq!(bw_graph_save(g, path.as_ptr()), BW_OK);
        let mut h = ptr::null_mut();
        assert_eq!(bw_graph_load(path.as_ptr(), &mut h), BW_OK);
        assert_eq!(bw_graph_n(h), 40);
        bw_graph_free(h);
        bw_graph_free(g);
        let missing = CString::new(dir.path().join("none.txt").to_str().unwrap()).unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(bw_graph_load(missing.as_ptr(), &mut h), BW_IO);
        assert!(!last_error().is_empty());
    }
}

#[test]
fn cover_run_is_deterministic() {
    let g = union_graph(200, 1);
    let policy = BwPolicy { kind: BW_POLICY_SIMPLE, ..Default::default() };
    let (mut a, mut b) = (BwCoverResult::default(), BwCoverResult::default());
    unsafe {
        assert_eq!(bw_run_cover(g, &policy, 0, 77, 0, &mut a), BW_OK);
        assert_eq!(bw_run_cover(g, &policy, 0, 77, 0, &mut b), BW_OK);
        assert_eq!(a.covered, 1);
        assert_eq!((a.cover_time, a.red_uses), (b.cover_time, b.red_uses));
        assert_eq!(a.steps_taken, a.cover_time);

        let bad = BwPolicy { kind: BW_POLICY_FLIP, rho_r: 0.5, rho_b: 0.5, ..Default::default() };
        assert_eq!(bw_run_cover(g, &bad, 0, 1, 0, &mut a), BW_INVALID_PARAMETER);
        assert_eq!(bw_run_cover(g, &policy, 1000, 1, 0, &mut a), BW_INVALID_PARAMETER);
        assert_eq!(bw_run_cover(ptr::null(), &policy, 0, 1, 0, &mut a), BW_NULL_POINTER);

        let capped = BwPolicy { kind: BW_POLICY_OBLIVIOUS, budget: 0, ..Default::default() };
        assert_eq!(bw_run_cover(g, &capped, 0, 1, 50, &mut a), BW_OK);
        assert_eq!((a.covered, a.steps_taken, a.red_uses), (0, 50, 0));
        bw_graph_free(g);
    }
}

#[test]
fn theory_calls() {
    let mut x = 0.0;
    unsafe {
        assert_eq!(bw_sigma_rb(1, 2, &mut x), BW_OK);
        assert_eq!(x, 2.0);
        assert_eq!(bw_theta_flip(2.0 / 3.0, &mut x), BW_OK);
        assert!((x - 2.0).abs() < 1e-12);
        assert_eq!(bw_theta_flip(2.0, &mut x), BW_INVALID_PARAMETER);
        let mut s = BwFlipSolution::default();
        assert_eq!(bw_flip_fixed_point(1, 2, 1.0 / 3.0, 1.0 / 3.0, &mut s), BW_OK);
        assert!((s.expected_returns - 2.0).abs() < 1e-9);
        assert_eq!(bw_flip_fixed_point(1, 2, 0.1, 0.1, &mut s), BW_INVALID_PARAMETER);
        assert_eq!(bw_sigma_rb(1, 2, ptr::null_mut()), BW_NULL_POINTER);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/budgetwalk.h")).unwrap();
    for name in [
        "typedef struct BwGraph BwGraph;",
        "bw_graph_generate",
        "bw_graph_load",
        "bw_graph_save",
        "bw_graph_free",
        "bw_run_cover",
        "bw_theta_flip",
        "bw_flip_fixed_point",
        "bw_last_error",
        "#define BW_OK 0",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "budgetwalk.h"

int main(void) {
    BwGraph *g = NULL;
    if (bw_graph_generate(BW_MODEL_HAMILTON, 50, 1, 0, 4, &g) != BW_OK) return 10;
    if (bw_graph_n(g) != 50) return 11;
    BwPolicy p = {0};
    p.kind = BW_POLICY_SIMPLE;
    BwCoverResult res;
    if (bw_run_cover(g, &p, 0, 1, 0, &res) != BW_OK || !res.covered) return 12;
    bw_graph_free(g);
    double theta = 0.0;
    if (bw_theta_flip(0.9, &theta) != BW_OK) return 13;
    if (bw_graph_generate(BW_MODEL_UNION, 5, 1, 2, 0, &g) != BW_INVALID_PARAMETER) return 14;
    printf("%s\n", bw_last_error());
    return 0;
}
"#;

/// Compiles a C client against the generated header and the static library.
#[test]
fn c_client_links_and_runs() {
    // Test binaries live in target/<profile>/deps.
    let profile_dir: PathBuf = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libbudgetwalk_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let exe = dir.path().join("client");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "client exited with {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).contains("n·r must be even"));
}

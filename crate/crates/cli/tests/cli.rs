use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn rainbow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rainbow")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = rainbow(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn families(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../families").join(name).to_string_lossy().into_owned()
}

#[test]
fn two_cycle_code() {
    let r = report(&["build", "--factors", "cycle:4,cycle:4", "--tasks", "params,distance,logicals"]);
    assert_eq!(r["n"], 32);
    assert_eq!(r["k"], 4);
    assert_eq!(r["predicted_k"], 4);
    assert_eq!(r["d_certified"], 4);
    assert_eq!(r["tool"]["name"], "rainbow");
    assert_eq!(r["logicals"]["lz_weights"].as_array().unwrap().len(), 4);
}

#[test]
fn three_cycle_code_with_exact_distance() {
    let r = report(&[
        "build", "--factors", "cycle:4,cycle:4,cycle:4", "--class", "generic", "--x", "3", "--z", "2", "--tasks",
        "params,distance", "--wmax", "4",
    ]);
    assert_eq!((r["n"].as_u64(), r["k"].as_u64()), (Some(384), Some(9)));
    assert_eq!(r["d_exact_upto"], 3);
    assert_eq!(r["d_upper"], 4);
    assert_eq!(r["d_certified"], 4);
}

#[test]
fn figure_eight_mixed_gate() {
    let r = report(&["build", "--factors", "fig8,fig8,fig8", "--class", "mixed", "--tasks", "params,triorth"]);
    assert_eq!((r["n"].as_u64(), r["k"].as_u64()), (Some(3072), Some(24)));
    assert_eq!(r["triorth"]["gate_found"], true);
    assert_eq!(r["ccz"]["triples"].as_array().unwrap().len(), 24);
    assert_eq!(r["seeds"], serde_json::json!([1]));
}

#[test]
fn complete_bipartite_mixed() {
    let r = report(&["build", "--factors", "kbip:4,4 ×3", "--class", "mixed", "--tasks", "params"]);
    assert_eq!((r["n"].as_u64(), r["k"].as_u64()), (Some(24576), Some(297)));
}

#[test]
fn contraction_matches_family_file() {
    let base = ["contract", "--factors", "cycle:4,cycle:6", "--colours", "c0", "--tasks", "params,distance"];
    let a = report(&base);
    assert_eq!((a["n"].as_u64(), a["k"].as_u64(), a["d_certified"].as_u64()), (Some(24), Some(2), Some(4)));
    let file = families("cont_c0_2d.json");
    let mut args = base.to_vec();
    args.extend(["--families", &file]);
    let b = report(&args);
    assert_eq!(a["n"], b["n"]);
    assert_eq!(a["k"], b["k"]);
    assert_eq!(a["contraction"]["families"], b["contraction"]["families"]);

    let c = report(&[
        "contract", "--factors", "cycle:4*3", "--colours", "0,3", "--families", &families("cont_c0_c3_3d.json"),
    ]);
    assert_eq!((c["n"].as_u64(), c["k"].as_u64()), (Some(96), Some(9)));
}

#[test]
fn reports_are_byte_stable() {
    let args = ["build", "--factors", "cycle:4,cycle:6", "--tasks", "params,distance", "--iters", "50", "--seed", "3"];
    let a = rainbow(&args);
    let b = rainbow(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let threaded = Command::new(env!("CARGO_BIN_EXE_rainbow")).args(args).env("RAINBOW_THREADS", "2").output().unwrap();
    assert_eq!(a.stdout, threaded.stdout);
}

#[test]
fn export_then_distance() {
    let dir = scratch("export");
    let d = dir.to_string_lossy().into_owned();
    let out = rainbow(&["build", "--factors", "cycle:4,cycle:4", "--tasks", "params,export,logicals", "--out", &d]);
    assert!(out.status.success());
    for f in ["hx.alist", "hz.alist", "lx.txt", "lz.txt"] {
        assert!(dir.join(f).is_file(), "{f} missing");
    }
    let report_path = dir.join("report.json").to_string_lossy().into_owned();
    let hx = dir.join("hx.alist").to_string_lossy().into_owned();
    let hz = dir.join("hz.alist").to_string_lossy().into_owned();
    let out = rainbow(&["distance", "--hx", &hx, "--hz", &hz, "--wmax", "4", "--report", &report_path]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!((r["n"].as_u64(), r["k"].as_u64(), r["d_certified"].as_u64()), (Some(32), Some(4), Some(4)));
}

#[test]
fn exit_codes() {
    assert_eq!(rainbow(&["build", "--factors", "cycle:5,cycle:4"]).status.code(), Some(2));
    assert_eq!(rainbow(&["build", "--factors", "cycle:4,cycle:4", "--class", "mixed"]).status.code(), Some(2));
    assert_eq!(rainbow(&["build", "--factors", "cycle:4,cycle:4", "--tasks", "bogus"]).status.code(), Some(2));

    let dir = scratch("anticommuting");
    fs::write(dir.join("a.alist"), "3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 3\n").unwrap();
    let a = dir.join("a.alist").to_string_lossy().into_owned();
    assert_eq!(rainbow(&["distance", "--hx", &a, "--hz", &a]).status.code(), Some(3));

    let over = rainbow(&["build", "--factors", "cycle:4,cycle:4", "--tasks", "distance", "--wmax", "9", "--budget", "10"]);
    assert_eq!(over.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&over.stderr).contains("budget"));

    let bad = Command::new(env!("CARGO_BIN_EXE_rainbow"))
        .args(["build", "--factors", "cycle:4,cycle:4"])
        .env("RAINBOW_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn inspect_outputs() {
    let r = report(&["inspect", "--factors", "fig8,cycle:4", "--screen"]);
    assert_eq!(r["dim"], 2);
    assert_eq!(r["factors"][0]["circuit_rank"], 2);
    assert_eq!(r["colour_code_lattice"], false);
    let out = rainbow(&["inspect", "--factors", "cycle:4,cycle:4", "--maximal", "0,2"]);
    let lines: Vec<Value> =
        String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 8);
    assert!(lines.iter().all(|l| l["support"].as_array().unwrap().len() == 4));
}

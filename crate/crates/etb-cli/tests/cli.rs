//! End-to-end runs of every subcommand at the smallest scale.

use std::process::{Command, Output};

fn etb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn build_all_kinds_f2_2() {
    for kind in ["fl", "spl", "et", "cells"] {
        let out = etb(&["build", "--ring", "fq:2", "--rank", "2", "--kind", kind]);
        let v = json_of(&out);
        assert_eq!(v["schema"], 1);
        assert_eq!(v["rank"], 2);
        let vertices = v["vertices"].as_array().unwrap();
        if kind == "et" || kind == "cells" {
            assert_eq!(vertices.len(), 6);
        } else {
            assert_eq!(vertices.len(), 3);
        }
        if kind == "cells" {
            assert_eq!(v["cells"].as_array().unwrap().len(), 6);
        }
    }
}

#[test]
fn homology_et_f2_2_is_two_circles_worth() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("h.csv");
    let out = etb(&[
        "homology",
        "--ring",
        "fq:2",
        "--rank",
        "2",
        "--kind",
        "et",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    let v = json_of(&out);
    let h = v["homology"].as_array().unwrap();
    assert_eq!(h[0]["betti"], 1);
    assert_eq!(h[1]["betti"], 1);
    let table = std::fs::read_to_string(csv).unwrap();
    assert!(table.starts_with("degree,betti,torsion"));
    assert!(table.contains("1,1,"));
}

#[test]
fn ss_f2_2_pages() {
    let out = etb(&["ss", "--ring", "fq:2", "--rank", "2", "--coeff", "q"]);
    let v = json_of(&out);
    let pages = v["pages"].as_array().unwrap();
    assert_eq!(pages.len(), 2);
    // E^1 has dimension 3 at (0,0) and (1,0)
    let e1: Vec<_> = pages[0]["entries"].as_array().unwrap().to_vec();
    assert!(e1.contains(&serde_json::json!([0, 0, 3])));
    assert!(e1.contains(&serde_json::json!([1, 0, 3])));
}

#[test]
fn bloch_and_claim_f2() {
    let out = etb(&["bloch", "--ring", "fq:2"]);
    let v = json_of(&out);
    assert_eq!(v["group"]["betti"], 0);
    let out = etb(&["claim", "--ring", "fq:2"]);
    let v = json_of(&out);
    assert_eq!(v["outcome"], "vacuous");
}

#[test]
fn verify_all_suites_small() {
    for suite in ["equivalence", "polyhedral", "spectral", "grassmann", "group"] {
        let out = etb(&["verify", "--suite", suite, "--ring", "fq:2", "--rank", "2"]);
        let v = json_of(&out);
        assert_eq!(v["pass"], true, "suite {suite}");
    }
}

#[test]
fn probe_degree_zero() {
    let out = etb(&["probe", "--ring", "fq:2", "--m", "0", "--d", "2"]);
    let v = json_of(&out);
    assert_eq!(v["dim_coinvariants"], 1);
    assert_eq!(v["dim_target"], 1);
    assert_eq!(v["induced_rank"], 1);
}

#[test]
fn exit_codes() {
    // usage: unknown suite
    let out = etb(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    // usage: bad ring descriptor
    let out = etb(&["build", "--ring", "fq:6", "--rank", "2", "--kind", "fl"]);
    assert_eq!(out.status.code(), Some(2));
    // budget exceeded
    let out = etb(&[
        "build",
        "--ring",
        "fq:2",
        "--rank",
        "3",
        "--kind",
        "et",
        "--max-simplices",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(3));
    // empty suite name is a usage error
    let out = etb(&["verify", "--suite", ""]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_defaults_and_unknown_key_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"ring": "fq:2", "rank": 2, "kind": "et"}"#).unwrap();
    let out = etb(&["homology", "--config", cfg.to_str().unwrap()]);
    let v = json_of(&out);
    assert_eq!(v["ring"], "fq:2");
    // flags override the config
    let out = etb(&["homology", "--config", cfg.to_str().unwrap(), "--ring", "fq:3"]);
    let v = json_of(&out);
    assert_eq!(v["ring"], "fq:3");
    // unknown keys are rejected
    std::fs::write(&cfg, r#"{"ring": "fq:2", "surprise": 1}"#).unwrap();
    let out = etb(&["homology", "--config", cfg.to_str().unwrap(), "--rank", "2", "--kind", "fl"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_up_to_timing() {
    let run = || {
        let v = json_of(&etb(&["homology", "--ring", "fq:3", "--rank", "2", "--kind", "fl"]));
        v
    };
    let (mut a, mut b) = (run(), run());
    let ha = a["result_hash"].clone();
    let hb = b["result_hash"].clone();
    assert_eq!(ha, hb);
    a.as_object_mut().unwrap().remove("timing_ms");
    b.as_object_mut().unwrap().remove("timing_ms");
    assert_eq!(a, b);
}

#[test]
fn out_file_writing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = etb(&[
        "build",
        "--ring",
        "fq:2",
        "--rank",
        "1",
        "--kind",
        "fl",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 1);
}

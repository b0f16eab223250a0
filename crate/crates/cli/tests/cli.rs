use std::path::PathBuf;
use std::process::{Command, Output};

use qpt_core::io::parse_qp;
use qpt_core::qp::canonical_form;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn qpt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpt")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn mutate_matches_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.qp");
    let a3 = fixture("a3.qp");
    let o = qpt(&["mutate", a3.to_str().unwrap(), "-k", "2", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    let got = parse_qp(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let want = parse_qp(&std::fs::read_to_string(fixture("mu2_a3.qp")).unwrap()).unwrap();
    assert_eq!(canonical_form(&got).0, canonical_form(&want).0);
}

#[test]
fn explore_depth_zero_is_one_heart() {
    let o = qpt(&["explore", fixture("a3.qp").to_str().unwrap(), "--depth", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("hearts: 1\nedges: 0\n"));
}

#[test]
fn quotient_dot_has_five_classes_in_region() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("q.dot");
    let o = qpt(&[
        "quotient",
        fixture("a3.qp").to_str().unwrap(),
        "-I",
        "2",
        "--depth",
        "6",
        "--region",
        fixture("eg_a3_region.json").to_str().unwrap(),
        "--dot",
        dot.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&dot).unwrap();
    let nodes = text
        .lines()
        .filter(|l| l.contains("[label=") && !l.contains("->"))
        .count();
    let edges = text.lines().filter(|l| l.contains("->")).count();
    assert_eq!((nodes, edges), (5, 5));
}

#[test]
fn jacobian_and_eje_output() {
    let o = qpt(&["jacobian", fixture("mu2_a3.qp").to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "dims: 3 3\nverdict: Finite(6)\n");
    let o = qpt(&["eje", fixture("a3.qp").to_str().unwrap(), "-I", "2"]);
    let e = parse_qp(&stdout(&o)).unwrap();
    assert_eq!(e.vertices(), &["1".to_string(), "3".to_string()]);
    assert_eq!(e.quiver.count("1", "3"), 1);
    assert_eq!(e.quiver.arrows.len(), 1);
}

#[test]
fn exit_codes() {
    let missing = qpt(&["validate", "/nonexistent.qp"]);
    assert_eq!(missing.status.code(), Some(1));
    let bad_vertex = qpt(&["mutate", fixture("a3.qp").to_str().unwrap(), "-k", "9"]);
    assert_eq!(bad_vertex.status.code(), Some(1));
    let usage = qpt(&["mutate"]);
    assert_eq!(usage.status.code(), Some(1));
    let cycle = fixture("cycle3.qp");
    let unknown = qpt(&["jacobian", cycle.to_str().unwrap(), "--max-degree", "8"]);
    assert_eq!(unknown.status.code(), Some(3));
    assert!(stdout(&unknown).contains("Unknown(8)"));
    let not_finite = qpt(&["explore", cycle.to_str().unwrap()]);
    assert_eq!(not_finite.status.code(), Some(2));
    let eje = qpt(&["eje", cycle.to_str().unwrap(), "-I", "1", "--max-degree", "8"]);
    assert_eq!(eje.status.code(), Some(2));
}

#[test]
fn validate_rejects_two_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.qp");
    std::fs::write(
        &p,
        r#"{"vertices":["1","2"],"arrows":[{"id":"a","src":"1","tgt":"2"},{"id":"b","src":"2","tgt":"1"}]}"#,
    )
    .unwrap();
    let o = qpt(&["validate", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = qpt(&["validate", fixture("square_cycle.qp").to_str().unwrap()]);
    assert!(o.status.success());
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for threads in ["1", "4"] {
        let json = dir.path().join(format!("eg{threads}.json"));
        let dot = dir.path().join(format!("eg{threads}.dot"));
        let o = Command::new(env!("CARGO_BIN_EXE_qpt"))
            .env("RAYON_NUM_THREADS", threads)
            .args([
                "explore",
                fixture("a3.qp").to_str().unwrap(),
                "--depth",
                "5",
                "--json",
                json.to_str().unwrap(),
                "--dot",
                dot.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(o.status.success());
        bytes.push((o.stdout, std::fs::read(json).unwrap(), std::fs::read(dot).unwrap()));
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn polygon_glued_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("end.qp");
    let o = qpt(&[
        "polygon",
        fixture("glued_8_6.json").to_str().unwrap(),
        "--quiver",
        q.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("flips: (1,4) (1,5) (1,6) (8,12) (8,11)\n"));
    assert!(s.contains("d_k: (2,8) present=true"));
    assert!(s.contains("d_l: (1,9) present=true"));
    let end = parse_qp(&std::fs::read_to_string(q).unwrap()).unwrap();
    assert!(end.quiver.arrows.iter().all(|a| a.tgt != "S"));
}

#[test]
fn silting_and_lift_commands() {
    let a3 = fixture("a3.qp");
    let o = qpt(&["silting", a3.to_str().unwrap(), "--depth", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = qpt(&[
        "silting",
        a3.to_str().unwrap(),
        "-I",
        "2",
        "--depth",
        "6",
        "--region",
        fixture("eg_a3_region.json").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("partial silting objects: 5\nedges: 5\n"));
    let o = qpt(&["lift", a3.to_str().unwrap(), "-k", "3", "-I", "2", "--word", "2+"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("tilted heart:"));
}

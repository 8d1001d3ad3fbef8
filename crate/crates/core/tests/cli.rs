//! End-to-end runs of the `tropmult` binary: fixture generation, method
//! dispatch, weighted counts, the identity-suite runner, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_tropmult"))
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn write_doc(dir: &std::path::Path, name: &str, args: &[&str]) -> PathBuf {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let path = dir.join(name);
    std::fs::write(&path, out.stdout).unwrap();
    path
}

#[test]
fn gen_validate_mult_roundtrip() {
    let dir = std::env::temp_dir().join(format!("tropmult-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let g1 = write_doc(
        &dir,
        "genus1.json",
        &["gen", "genus1", "--params", "1,1,1,2,1,3"],
    );
    let g1s = g1.to_str().unwrap();
    let out = run(&["validate", g1s]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("valid"));

    // |1·2·(1+3) − 1·1·(1+2)| = 5 by the determinant and by the field theory
    for method in ["det", "trqft", "trqft-tree"] {
        let out = run(&["mult", g1s, "--method", method]);
        assert!(
            out.status.success(),
            "{method}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(stdout(&out).trim(), "5", "method {method}");
    }
    // genus-0-only methods refuse with the precondition exit code
    for method in ["box", "bracket"] {
        let out = run(&["mult", g1s, "--method", method]);
        assert_eq!(out.status.code(), Some(2), "method {method}");
    }

    let e2 = write_doc(&dir, "e2.json", &["gen", "e2", "--weight", "3"]);
    let e2s = e2.to_str().unwrap();
    for method in ["det", "trqft", "trqft-tree", "box", "bracket", "split"] {
        let out = run(&["mult", e2s, "--method", method]);
        assert!(
            out.status.success(),
            "{method}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(stdout(&out).trim(), "9", "method {method}");
    }

    // a one-curve weighted count: Mult 5, trivial automorphisms, ⟨V⟩ = 1
    let out = run(&["gw", g1s]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "5");
    // several documents aggregate: 5 + 9
    let out = run(&["gw", g1s, e2s]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "14");

    // theta fixtures parse back and agree across methods
    let th = write_doc(
        &dir,
        "theta.json",
        &["gen", "theta", "--seed", "5", "--lambda", "2"],
    );
    let ths = th.to_str().unwrap();
    let det = stdout(&run(&["mult", ths, "--method", "det"]));
    let br = stdout(&run(&["mult", ths, "--method", "bracket"]));
    assert_eq!(det.trim(), br.trim());

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes_and_diagnostics() {
    // missing file: parse error, exit 1
    let out = run(&["mult", "/nonexistent/curve.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    // malformed JSON: exit 1
    let dir = std::env::temp_dir().join(format!("tropmult-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ nope").unwrap();
    let out = run(&["mult", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    // an unbalanced curve: validate reports the violation and exits 2
    let unbalanced = dir.join("unbalanced.json");
    std::fs::write(
        &unbalanced,
        r#"{
  "rank": 2,
  "vertices": [{"id": 0, "genus": 0}],
  "edges": [
    {"id": 0, "tail": 0, "head": null, "weight": 1, "direction": [1, 0]},
    {"id": 1, "tail": 0, "head": null, "weight": 1, "direction": [0, 1]}
  ],
  "markings": [
    {"index": 0, "edge": 0, "constraint": {"span": [[1,0],[0,1]]}},
    {"index": 1, "edge": 1, "constraint": {"span": [[1,0],[0,1]]}}
  ]
}"#,
    )
    .unwrap();
    let out = run(&["validate", unbalanced.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("balancing"));

    // a valid but non-rigid input: precondition failure, exit 2
    let tripod = dir.join("tripod.json");
    std::fs::write(
        &tripod,
        r#"{
  "rank": 2,
  "vertices": [{"id": 0, "genus": 0}],
  "edges": [
    {"id": 0, "tail": 0, "head": null, "weight": 1, "direction": [-1, 0]},
    {"id": 1, "tail": 0, "head": null, "weight": 1, "direction": [0, -1]},
    {"id": 2, "tail": 0, "head": null, "weight": 1, "direction": [1, 1]}
  ],
  "markings": [
    {"index": 0, "edge": 0, "constraint": {"span": [[1,0],[0,1]]}},
    {"index": 1, "edge": 1, "constraint": {"span": [[1,0],[0,1]]}},
    {"index": 2, "edge": 2, "constraint": {"span": [[1,0],[0,1]]}}
  ]
}"#,
    )
    .unwrap();
    let out = run(&["mult", tripod.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn check_suites_run_and_report() {
    let out = run(&["check", "--suite", "all", "--seed", "3", "--cases", "60"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    for name in [
        "coproduct-defining-equation",
        "box-class-coproduct",
        "seven-term-identity",
        "jacobi-dij-vanish-on-a0",
        "l2-equals-schouten-on-a0",
    ] {
        assert!(text.contains(name), "missing check {name} in:\n{text}");
    }
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(!text.contains("FAIL"));

    // reproducibility: identical output for identical seeds
    let again = run(&["check", "--suite", "all", "--seed", "3", "--cases", "60"]);
    assert_eq!(stdout(&out), stdout(&again));

    let out = run(&["check", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rank_cap_env_is_honored() {
    let dir = std::env::temp_dir().join(format!("tropmult-cli-cap-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let e1 = write_doc(&dir, "e1.json", &["gen", "e1"]);
    let out = Command::new(bin())
        .args(["validate", e1.to_str().unwrap()])
        .env("TROPMULT_RANK_CAP", "1")
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "rank 2 curve exceeds a cap of 1"
    );
    assert!(stdout(&out).contains("rank"));
    let out = Command::new(bin())
        .args(["validate", e1.to_str().unwrap()])
        .env("TROPMULT_RANK_CAP", "4")
        .output()
        .unwrap();
    assert!(out.status.success());
    std::fs::remove_dir_all(&dir).ok();
}

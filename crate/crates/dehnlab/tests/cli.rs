//! End-to-end checks of the `dehnlab` binary: exit codes, JSON and CSV
//! shapes, and the round trip decompose → verify → diagram.

use std::path::PathBuf;
use std::process::{Command, Output};

fn dehnlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dehnlab"))
        .args(args)
        .output()
        .expect("binary must run")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("dehnlab-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn solve_exit_codes() {
    let out = dehnlab(&["solve", "--presentation", "lysenok", "--word", "bcd"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"trivial\":true"));

    let out = dehnlab(&["solve", "--presentation", "lysenok", "--word", "ab"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("\"trivial\":false"));

    let out = dehnlab(&["solve", "--presentation", "gamma_t", "--word", "tbTD"]);
    assert_eq!(out.status.code(), Some(0));

    let out = dehnlab(&["solve", "--presentation", "gamma_t", "--word", "t"]);
    assert_eq!(out.status.code(), Some(1));

    // Unknown presentations and foreign letters are usage errors.
    let out = dehnlab(&["solve", "--presentation", "nonsense", "--word", "a"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dehnlab(&["solve", "--presentation", "lysenok", "--word", "xyz"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decompose_verify_diagram_round_trip() {
    let cert_path = tmp("cert.json");
    let out = dehnlab(&[
        "decompose",
        "--word",
        "acaaca",
        "--target",
        "r",
        "--out",
        cert_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let out = dehnlab(&["verify", "--cert", cert_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"verified\":true"));

    let out = dehnlab(&["diagram", "--cert", cert_path.to_str().unwrap(), "--fold", "--stats"]);
    assert_eq!(out.status.code(), Some(0));
    let stats: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(stats["boundary"], "acaaca");
    assert_eq!(
        stats["v"].as_i64().unwrap() - stats["e"].as_i64().unwrap()
            + stats["f"].as_i64().unwrap(),
        1
    );

    // Tamper with a factor: verification must fail with exit 1.
    let text = std::fs::read_to_string(&cert_path).unwrap();
    let bad = text.replacen("\"aa\"", "\"bb\"", 1);
    let bad_path = tmp("bad.json");
    std::fs::write(&bad_path, bad).unwrap();
    let out = dehnlab(&["verify", "--cert", bad_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("\"verified\":false"));

    let _ = std::fs::remove_file(cert_path);
    let _ = std::fs::remove_file(bad_path);
}

#[test]
fn decompose_nontrivial_is_a_negative_decision() {
    let out = dehnlab(&["decompose", "--word", "ab"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("\"trivial\":false"));
}

#[test]
fn sweep_writes_csv() {
    let csv_path = tmp("rows.csv");
    let out = dehnlab(&[
        "sweep",
        "--presentation",
        "ex21",
        "--max-len",
        "5",
        "--max-factors",
        "3",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,f2_exact,f1_upper,f0_upper,flags"));
    assert_eq!(csv.lines().count(), 7); // header + lengths 0..=5
    assert!(csv.lines().any(|l| l.starts_with("4,1,")));
    let _ = std::fs::remove_file(csv_path);
}

#[test]
fn relators_lists_heights() {
    let out = dehnlab(&["relators", "--presentation", "lysenok", "--max-len", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().any(|r| r["relator"] == "bcd" && r["height"] == 0));
}

#[test]
fn audit_relator_series() {
    let json_path = tmp("audit.json");
    let out = dehnlab(&[
        "audit",
        "--series",
        "relators",
        "--max-x",
        "24",
        "--out",
        json_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert!(report["seed"].is_number());
    assert!(report["rows"].as_array().unwrap().len() >= 3);
    let _ = std::fs::remove_file(json_path);
}

#[test]
fn audit_gamma_t_sampling() {
    let out = dehnlab(&[
        "audit",
        "--presentation",
        "gamma_t",
        "--max-x",
        "8",
        "--samples",
        "10",
        "--seed",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["seed"], 5);
    assert_eq!(report["bound_violations"], 0);
}

#[test]
fn presentation_file_input() {
    let p_path = tmp("pres.json");
    std::fs::write(
        &p_path,
        r#"{"generators":["a","b"],"relators":{"kind":"explicit","words":["abAB"]}}"#,
    )
    .unwrap();
    let out = dehnlab(&[
        "relators",
        "--presentation",
        p_path.to_str().unwrap(),
        "--max-len",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("abAB"));
    let _ = std::fs::remove_file(p_path);
}

//! End-to-end runs of the binary: exit codes, frozen output rows, and
//! byte-stable report bundles.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cslab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cslab"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn embed_rejects_epsilon_above_threshold() {
    let d = tempfile::tempdir().unwrap();
    let out = cslab(
        d.path(),
        &["reg", "embed", "--family", "random:30", "--epsilon", "0.1", "--delta", "0.5"],
    );
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("1/25 (0.04)"), "stderr must carry the exact threshold: {err}");
}

#[test]
fn support_violation_exits_two() {
    let d = tempfile::tempdir().unwrap();
    let out = cslab(
        d.path(),
        &["charseq", "--family", "cycle:6", "--formula", "edge", "--max-level", "3", "--support", "2"],
    );
    assert_eq!(code(&out), 2, "a verified violation is its own exit code");
    let s = stdout(&out);
    assert!(s.contains("pool indices [0, 2, 4]"), "counterexample line missing: {s}");
    assert!(d.path().join("charseq.json").exists());
}

#[test]
fn loop_scan_reports_none() {
    let d = tempfile::tempdir().unwrap();
    let out = cslab(d.path(), &["indep", "loops", "--stages", "2", "--cap", "2", "--rows", "6"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("loops: none"));
}

#[test]
fn alpha_csv_frozen_rows() {
    let d = tempfile::tempdir().unwrap();
    let out = cslab(
        d.path(),
        &["--format", "csv", "alpha", "--family", "empty:6", "--n", "6"],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let csv = fs::read_to_string(d.path().join("alpha.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,alpha,exact,turan_upper_k,floor_half,witness");
    assert_eq!(lines.last().unwrap(), &"6,15,true,9,3,0;1;2;3;4;5");
    assert_eq!(lines.len(), 7);
}

#[test]
fn report_bundle_is_byte_stable() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        let out = cslab(d.path(), &["report", "--family", "half:4"]);
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    }
    let names = [
        "report.json",
        "structure.json",
        "charseq.json",
        "p2.dot",
        "partition.json",
        "pairs.csv",
        "reduced.dot",
        "alpha.csv",
    ];
    for name in names {
        let a = fs::read(d1.path().join(name)).unwrap_or_else(|_| panic!("{name} missing"));
        let b = fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn structure_file_round_trips_through_alpha() {
    let d = tempfile::tempdir().unwrap();
    let s_path = d.path().join("s.json");
    let gen = cslab(
        d.path(),
        &["gen", "--family", "random:12", "--seed", "5", "--out", s_path.to_str().unwrap()],
    );
    assert_eq!(code(&gen), 0, "stderr: {}", stderr(&gen));

    let fam_dir = tempfile::tempdir().unwrap();
    let from_family = cslab(
        fam_dir.path(),
        &["--format", "csv", "alpha", "--family", "random:12", "--seed", "5", "--n", "4"],
    );
    assert_eq!(code(&from_family), 0);

    let file_dir = tempfile::tempdir().unwrap();
    let from_file = cslab(
        file_dir.path(),
        &["--format", "csv", "alpha", "--input", s_path.to_str().unwrap(), "--n", "4"],
    );
    assert_eq!(code(&from_file), 0, "stderr: {}", stderr(&from_file));

    let a = fs::read(fam_dir.path().join("alpha.csv")).unwrap();
    let b = fs::read(file_dir.path().join("alpha.csv")).unwrap();
    assert_eq!(a, b, "a reloaded structure must reproduce the table");
}

#[test]
fn malformed_structure_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let bad = d.path().join("bad.json");
    fs::write(&bad, r#"{"constants": {}, "n": 4, "parts": {}, "relations": {"R": [[0, 9]]}}"#).unwrap();
    let out = cslab(d.path(), &["alpha", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).starts_with("error:"), "stderr: {}", stderr(&out));

    let gone = d.path().join("missing.json");
    let out2 = cslab(d.path(), &["alpha", "--input", gone.to_str().unwrap()]);
    assert_eq!(code(&out2), 1);
}

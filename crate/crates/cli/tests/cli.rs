//! End-to-end checks of the command-line surface: artifact round-trips,
//! exit codes, and byte-level determinism of repeated runs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_redpow")
}

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("redpow-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn budget_chain_prints_h_values() {
    let dir = tmpdir("budget");
    let out = run(&["budget", "--n", "3", "--m", "0", "--quiet"], &dir);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["value"], "2");
    assert_eq!(v["report"]["capped"], false);
    // Three recurrence steps below the base, each recording its h.
    assert_eq!(v["report"]["steps"].as_array().unwrap().len(), 4);
}

#[test]
fn axioms_require_seed_and_pass() {
    let dir = tmpdir("axioms");
    let out = run(
        &[
            "axioms",
            "--model",
            "nat",
            "--samples",
            "50",
            "--seed",
            "3",
            "--quiet",
        ],
        &dir,
    );
    assert!(out.status.success());
    let missing = run(&["axioms", "--model", "nat", "--samples", "50"], &dir);
    assert!(!missing.status.success());
}

#[test]
fn solve_reads_system_files() {
    let dir = tmpdir("solve");
    std::fs::write(dir.join("sys.json"), r#"["x0+x1=1+1+1", "x0*x1=1+1"]"#).unwrap();
    let out = run(
        &["solve", "--system", "sys.json", "--bound", "5", "--quiet"],
        &dir,
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["solution"]["x0"], "1");
    assert_eq!(v["report"]["solution"]["x1"], "2");
}

#[test]
fn embed_verify_render_pipeline() {
    let dir = tmpdir("embed");
    std::fs::write(dir.join("elems.json"), r#"["0","1","X","X+1"]"#).unwrap();
    let built = run(
        &[
            "embed",
            "--elements",
            "elems.json",
            "--depth",
            "12",
            "--budget",
            "40",
            "--out",
            "table.json",
            "--quiet",
        ],
        &dir,
    );
    assert!(built.status.success(), "{built:?}");
    let verified = run(
        &["verify", "table.json", "--remark1-bound", "100", "--quiet"],
        &dir,
    );
    assert!(verified.status.success(), "{verified:?}");
    let rendered = run(&["render-table", "table.json"], &dir);
    assert!(rendered.status.success());
    let grid = String::from_utf8(rendered.stdout).unwrap();
    assert!(grid.contains("X+1"));
    assert!(grid.lines().count() >= 14);

    // Corrupting the tail of a standard column fails verification with
    // the failure exit code.
    let text = std::fs::read_to_string(dir.join("table.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["rows"][11][1] = "7".into();
    std::fs::write(dir.join("bad.json"), serde_json::to_string(&v).unwrap()).unwrap();
    let bad = run(&["verify", "bad.json", "--quiet"], &dir);
    assert_eq!(bad.status.code(), Some(2), "{bad:?}");
}

#[test]
fn embed_artifacts_are_byte_identical() {
    let dir = tmpdir("det");
    std::fs::write(dir.join("elems.json"), r#"["0","1","X"]"#).unwrap();
    for name in ["a.json", "b.json"] {
        let out = run(
            &[
                "embed",
                "--elements",
                "elems.json",
                "--depth",
                "8",
                "--budget",
                "25",
                "--out",
                name,
                "--quiet",
            ],
            &dir,
        );
        assert!(out.status.success());
    }
    let a = std::fs::read(dir.join("a.json")).unwrap();
    let b = std::fs::read(dir.join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn star_run_artifacts_are_byte_identical() {
    let dir = tmpdir("star");
    std::fs::write(dir.join("assign.json"), r#"{"0":"0","1":"1"}"#).unwrap();
    for name in ["a.json", "b.json"] {
        let out = run(
            &[
                "star",
                "--index",
                "0,1",
                "--assign",
                "assign.json",
                "--n-max",
                "10",
                "--cap",
                "12",
                "--family",
                "tails",
                "--out",
                name,
                "--quiet",
            ],
            &dir,
        );
        assert!(out.status.success(), "{out:?}");
    }
    let a = std::fs::read(dir.join("a.json")).unwrap();
    let b = std::fs::read(dir.join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn ufamily_check_reports_thresholds() {
    let dir = tmpdir("ufamily");
    let out = run(
        &[
            "ufamily",
            "--alpha",
            "w",
            "--n-max",
            "20",
            "--check",
            "--candidates",
            "0,1,2,w",
            "--quiet",
        ],
        &dir,
    );
    assert!(out.status.success(), "{out:?}");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ok"], true);
    let exhaustion = v["report"]["exhaustion"].as_array().unwrap();
    assert!(exhaustion
        .iter()
        .any(|e| e["beta"] == "2" && e["threshold"] == 16));
}

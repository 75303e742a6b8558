//! Golden-report determinism: each canonical document produces a report
//! that is byte-identical across runs once the run-time line is removed.
//!
//! The only run-dependent field is the top-level `timingMicros`; because
//! keys are emitted in sorted order it is never the last line, so dropping
//! that single line recovers the deterministic serialization exactly.

use std::path::{Path, PathBuf};
use std::process::Command;

const CASES: &[(&str, i32)] = &[
    ("mc_cotangent", 0),
    ("compat_classical", 0),
    ("casimir_sl2", 0),
    ("p2s_cotangent", 0),
    ("lift_obstructed", 1),
    ("bracket_mixed", 0),
];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(format!("{name}.wb"))
}

fn run_once(input: &Path, format: &str) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_workbench"))
        .arg("--input")
        .arg(input)
        .arg("--format")
        .arg(format)
        .env_remove("WORKBENCH_BASIS_CAP")
        .output()
        .expect("spawn workbench");
    let stdout = String::from_utf8(out.stdout).expect("utf-8 report");
    (stdout, out.status.code().expect("exit code"))
}

fn strip_timing(report: &str) -> String {
    report
        .lines()
        .filter(|l| !l.contains("\"timingMicros\""))
        .map(|l| format!("{l}\n"))
        .collect()
}

#[test]
fn golden_reports_are_byte_identical_across_runs() {
    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for (name, want_exit) in CASES {
        let input = fixture(name);
        let golden = std::fs::read_to_string(golden_dir.join(format!("{name}.json")))
            .unwrap_or_else(|e| panic!("missing golden for {name}: {e}"));
        let (first, exit1) = run_once(&input, "json");
        let (second, exit2) = run_once(&input, "json");
        assert_eq!(exit1, *want_exit, "{name}: unexpected exit code");
        assert_eq!(exit2, *want_exit, "{name}: exit code changed between runs");
        let first = strip_timing(&first);
        let second = strip_timing(&second);
        assert_eq!(first, second, "{name}: report differs between runs");
        assert_eq!(first, golden, "{name}: report differs from the golden file");
    }
}

#[test]
fn text_format_renders_every_golden_case() {
    for (name, want_exit) in CASES {
        let (text, exit) = run_once(&fixture(name), "text");
        assert_eq!(exit, *want_exit, "{name}: unexpected exit code");
        assert!(
            text.contains("verb:"),
            "{name}: text rendering is missing the verb line:\n{text}"
        );
        assert!(
            text.contains("status:"),
            "{name}: text rendering is missing the status line:\n{text}"
        );
    }
}

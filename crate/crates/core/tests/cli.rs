use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use odvp::cli::report::{ReportItem, RunReport};
use odvp::cli::spec_file::SpecFile;
use odvp::model::ProblemSpec;
use tempfile::TempDir;

fn odvp() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_odvp"));
    cmd.env_remove("ODVP_DEFAULT_TOL");
    cmd
}

fn run(args: &[&str]) -> Output {
    odvp().args(args).output().expect("binary runs")
}

fn write_spec(dir: &TempDir, name: &str, c: f64) -> PathBuf {
    let path = dir.path().join(name);
    let mut file = SpecFile::from_spec(&ProblemSpec::unit_ball_constant(c));
    file.tolerances = None;
    std::fs::write(&path, file.to_toml()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(out: &Output) -> RunReport {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "not a report ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn roots(r: &RunReport) -> Vec<f64> {
    r.results
        .iter()
        .filter_map(|i| match i {
            ReportItem::Root(root) => Some(root.critical_radius),
            _ => None,
        })
        .collect()
}

#[test]
fn reproduce_s8_is_deterministic_without_timing() {
    let a = run(&["--json", "--no-timing", "reproduce-s8"]);
    let b = run(&["--json", "--no-timing", "reproduce-s8"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!(r.schema, "odvp.run-report/1");
    assert!(r.timing_ms.is_none());
    assert!(r.warnings.iter().any(|w| w.contains("1/135")));

    let timed = report(&run(&["--json", "reproduce-s8"]));
    assert!(timed.timing_ms.is_some());
}

#[test]
fn text_report_shows_case_study_digits() {
    let out = run(&["reproduce-s8"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for digits in ["4.18879", "0.27925", "0.007407", "0.333", "1.7177159"] {
        assert!(text.contains(digits), "missing {digits} in\n{text}");
    }
    assert!(!text.contains("MISMATCH"));
}

#[test]
fn solve_and_check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_spec(&dir, "good.toml", 0.1);
    let bad = write_spec(&dir, "too_large.toml", 0.4);

    let out = run(&["--json", "solve", "--which", "qs", "--spec", s(&good)]);
    assert_eq!(out.status.code(), Some(0));
    let r = roots(&report(&out));
    assert!((r[0] - (10.0f64 / 3.0).sqrt()).abs() < 1e-8);

    let out = run(&["--json", "solve", "--which", "qs", "--spec", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["check", "--which", "qs", "--spec", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["check", "--spec", s(&good)]);
    assert_eq!(out.status.code(), Some(2), "B fails for c = 0.1");
    let out = run(&["check", "--which", "qs", "--spec", s(&good)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn illinois_agrees_with_bisection() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "c.toml", 0.005);
    let solve = |method: &str| {
        roots(&report(&run(&[
            "--json",
            "solve",
            "--which",
            "b",
            "--method",
            method,
            "--spec",
            s(&spec),
        ])))[0]
    };
    assert!((solve("bisection") - solve("illinois")).abs() < 1e-10);
}

#[test]
fn usage_and_parse_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_spec(&dir, "good.toml", 0.005);
    let broken = dir.path().join("broken.toml");
    std::fs::write(&broken, "dimension = 3\ncore_radius = \"one\"\n").unwrap();

    for args in [
        vec!["check", "--spec", s(&broken)],
        vec!["check", "--spec", "/nonexistent/spec.toml"],
        vec!["verify", "--checks", "nonsense", "--spec", s(&good)],
        vec!["check", "--which", "holder:abc", "--spec", s(&good)],
        vec!["scan", "--functional", "nope", "--spec", s(&good)],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(3),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let out = run(&["check", "--spec", s(&broken)]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("broken.toml:2:"), "{err}");
}

#[test]
fn tolerance_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "c.toml", 0.005);
    let identity_tol = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = odvp();
        if let Some(v) = env {
            cmd.env("ODVP_DEFAULT_TOL", v);
        }
        cmd.arg("--json");
        if let Some(v) = flag {
            cmd.args(["--tol", v]);
        }
        let out = cmd
            .args(["check", "--which", "qs", "--spec", s(&spec)])
            .output()
            .unwrap();
        report(&out).spec.unwrap().tolerances.unwrap().identity_tol
    };
    assert_eq!(identity_tol(None, None), 1e-10);
    assert_eq!(identity_tol(Some("1e-3"), None), 1e-3);
    assert_eq!(identity_tol(Some("1e-3"), Some("1e-7")), 1e-7);

    let out = odvp()
        .env("ODVP_DEFAULT_TOL", "abc")
        .args(["check", "--spec", s(&spec)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn scan_csv_rows_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "c.toml", 0.005);
    let out = run(&[
        "scan",
        "--functional",
        "Phi",
        "--steps",
        "37",
        "--spec",
        s(&spec),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("rho,value,derivative"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 37);
    assert_eq!(rows[0][0], 1.0);
    assert_eq!(rows[36][0], 5.0);
    assert!(
        rows.windows(2)
            .filter(|w| w[0][1].signum() != w[1][1].signum())
            .count()
            == 1
    );

    let file = dir.path().join("f.csv");
    let out = run(&[
        "--json",
        "scan",
        "--functional",
        "F",
        "--from",
        "1.2",
        "--to",
        "3",
        "--steps",
        "10",
        "--out",
        s(&file),
        "--sequential",
        "--spec",
        s(&spec),
    ]);
    assert_eq!(out.status.code(), Some(0));
    report(&out);
    assert_eq!(std::fs::read_to_string(&file).unwrap().lines().count(), 11);
}

#[test]
fn sweep_writes_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "c.toml", 0.005);
    let file = dir.path().join("sweep.csv");
    let out = run(&[
        "--json",
        "sweep",
        "--which",
        "b",
        "--values",
        "0.002,0.004,0.006,0.02",
        "--out",
        s(&file),
        "--spec",
        s(&spec),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(!r.warnings.is_empty(), "the failing row should be reported");
    let csv = std::fs::read_to_string(&file).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[3].ends_with(",,") || rows[3].split(',').nth(1) == Some(""));
    let radii: Vec<f64> = rows[..3]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(radii[0] > radii[1] && radii[1] > radii[2], "{radii:?}");
}

#[test]
fn verify_all_passes_on_the_unit_family() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(&dir, "c.toml", 0.005);
    let out = run(&["--json", "verify", "--spec", s(&spec)]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let r = report(&out);
    let identities = r
        .results
        .iter()
        .filter(|i| matches!(i, ReportItem::Identity(_)))
        .count();
    assert!(identities >= 9, "{identities} identity rows");
}

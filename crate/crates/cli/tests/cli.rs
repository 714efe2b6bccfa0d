//! End-to-end behaviour of the `fkdg` binary.

use std::fs;
use std::process::{Command, Output};

use fkdg_cli::presets::presets_dir;

fn fkdg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fkdg"))
        .args(args)
        .env("FKDG_PRESETS", presets_dir())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn lists_the_shipped_presets() {
    let o = fkdg(&["list-presets"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.lines().count() >= 8, "{s}");
    for name in ["table1-row1", "table3-row1", "table7-row1", "table8-row1"] {
        assert!(s.contains(name), "{name} missing from\n{s}");
    }
}

#[test]
fn every_preset_validates() {
    for entry in fs::read_dir(presets_dir()).unwrap() {
        let path = entry.unwrap().path();
        let o = fkdg(&["validate-config", path.to_str().unwrap()]);
        assert!(
            o.status.success(),
            "{}: {}",
            path.display(),
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn invalid_alpha_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(presets_dir().join("table1-row1.toml"))
        .unwrap()
        .replace("alpha = 0.7", "alpha = 1.2");
    let path = dir.path().join("bad.toml");
    fs::write(&path, text).unwrap();
    let o = fkdg(&["validate-config", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(0, 1)"));
}

#[test]
fn unknown_preset_is_a_config_error() {
    let o = fkdg(&["run", "--preset", "no-such-preset"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_expectations_exit_with_code_four() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(presets_dir().join("demo-single-run.toml")).unwrap();
    let text = format!(
        "{}\n[expect]\nerrors = [1.0e-12]\n",
        text.split("[expect]").next().unwrap()
    );
    let path = dir.path().join("strict.toml");
    fs::write(&path, text).unwrap();
    let out = dir.path().join("out");
    let o = fkdg(&[
        "run",
        "--config",
        path.to_str().unwrap(),
        "--check",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("FAIL error[0]"));
}

#[test]
fn run_writes_csv_text_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = fkdg(&[
        "run",
        "--preset",
        "table1-row1",
        "--out",
        out,
        "--plot",
        "--check",
        "--threads",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("table1-row1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("param,error,rate"));
    assert!(lines.next().unwrap().starts_with("1/12,"));
    assert_eq!(csv.lines().count(), 5);
    let svg = fs::read_to_string(dir.path().join("table1-row1.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));
    assert!(dir.path().join("table1-row1.txt").is_file());
}

#[test]
fn central_flux_warns() {
    let dir = tempfile::tempdir().unwrap();
    let o = fkdg(&[
        "run",
        "--preset",
        "table5-row3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

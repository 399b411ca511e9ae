use std::path::Path;
use std::process::{Command, Output};

fn curvem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvem"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("{key} missing in {text}"))
        .parse()
        .unwrap()
}

#[test]
fn solve_prints_errors_and_dof_count() {
    let o = curvem(&["solve", "--case", "circle-inclusion", "--k", "0", "--n", "8"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(value(&text, "e_q") > 0.0 && value(&text, "e_p") > 0.0);
    assert!(value(&text, "ndof") > 0.0);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = curvem(&["solve", "--case", "circle-inclusion", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn convergence_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = curvem(&[
            "convergence",
            "--case",
            "curved-boundary",
            "--k",
            "1",
            "--mode",
            "nogeo",
            "--sizes",
            "2,4,8,16",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(path).unwrap()
    };
    let strip = |csv: &str| -> Vec<String> {
        csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
    };
    let a = run("a.csv");
    let b = run("b.csv");
    assert_eq!(a.lines().count(), 5);
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn mesh_validate_and_solve_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.mesh");
    let p = path.to_str().unwrap();
    let o = curvem(&["mesh", "--case", "curved-boundary", "--n", "4", "--out", p]);
    assert!(o.status.success());
    assert!(Path::new(p).exists());

    let v = stdout(&curvem(&["validate", "--mesh", p]));
    assert_eq!(value(&v, "cells"), 16.0);
    assert!((value(&v, "total_area") - 1.0).abs() < 1e-12);

    let from_file = stdout(&curvem(&["solve", "--case", "from-file", "--mesh", p, "--k", "1", "--n", "4"]));
    let builtin = stdout(&curvem(&["solve", "--case", "curved-boundary", "--k", "1", "--n", "4"]));
    assert_eq!(value(&from_file, "ndof"), value(&builtin, "ndof"));
    assert!((value(&from_file, "e_q") - value(&builtin, "e_q")).abs() < 1e-12);
}

#[test]
fn missing_mesh_file_is_reported() {
    let o = curvem(&["validate", "--mesh", "/nonexistent/m.mesh"]);
    assert_eq!(o.status.code(), Some(1));
}

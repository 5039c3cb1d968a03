use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nhpassage(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhpassage"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn two_level_run_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, svg) = (dir.path().join("a.csv"), dir.path().join("a.svg"));
    let out = nhpassage(&["two-level", "--scenario", "a", "--csv", arg(&csv), "--svg", arg(&svg)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ALL CHECKS PASSED"));

    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,P0,P1,total,f_real,f_imag,norm"));
    assert_eq!(
        lines.next(),
        Some("0.000000000000,0.000000000000,1.000000000000,1.000000000000,0.000000000000,0.000000000000,1.000000000000")
    );
    assert_eq!(text.lines().count(), 1 + 4001);

    let chart = fs::read_to_string(&svg).unwrap();
    assert!(chart.starts_with("<svg"));
    assert_eq!(chart.matches("<polyline").count(), 3);
    assert!(chart.contains(">t/T<"));
}

#[test]
fn cyclic_run_has_excited_column_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|k| dir.path().join(format!("{k}.csv"))).collect();
    let svg = dir.path().join("cw.svg");
    for p in &paths {
        let out = nhpassage(&["cyclic", "--direction", "cw", "--loops", "1", "--csv", arg(p), "--svg", arg(&svg)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    }
    let a = fs::read(&paths[0]).unwrap();
    assert_eq!(a, fs::read(&paths[1]).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("t,P0,P1,Pe,total,f_real,f_imag,norm\n"));
    assert_eq!(fs::read_to_string(&svg).unwrap().matches("<polyline").count(), 4);
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let csv = dir.path().join("b.csv");
    fs::write(&cfg, format!("# two-level b\nscenario = two_level_b\nT = 1\ndt = 0.001\ncsv = {}\n", arg(&csv))).unwrap();
    let out = nhpassage(&["two-level", "--config", arg(&cfg), "--T", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("scenario two_level_b"));
    let last = fs::read_to_string(&csv).unwrap().lines().last().unwrap().to_string();
    assert!(last.starts_with("4.000000000000,"), "{last}");
}

#[test]
fn perturbed_drive_fails_checks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "scenario = two_level_c\nomega_scale = 1.01\n").unwrap();
    let out = nhpassage(&["verify", "--config", arg(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL triangularization"), "{stdout}");
    assert!(stdout.contains("SOME CHECKS FAILED"));
}

#[test]
fn verify_passes_for_a_builtin() {
    let out = nhpassage(&["verify", "--scenario", "d"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for name in ["biorthogonality", "Dyson remainder order", "Hermitian-limit von Neumann"] {
        assert!(stdout.contains(&format!("PASS {name}")), "{stdout}");
    }
}

#[test]
fn errors_exit_with_code_two() {
    assert_eq!(nhpassage(&["two-level", "--scenario", "z"]).status.code(), Some(2));
    assert_eq!(nhpassage(&["two-level", "--scenario", "cw"]).status.code(), Some(2));
    assert_eq!(nhpassage(&["two-level", "--dt", "0.3"]).status.code(), Some(2));
    assert_ne!(nhpassage(&["cyclic", "--loops", "many"]).status.code(), Some(0));
}

#[test]
fn list_shows_every_scenario() {
    let out = nhpassage(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for id in ["two_level_a", "two_level_d", "cyclic_cw", "cyclic_ccw", "custom"] {
        assert!(stdout.contains(id));
    }
}

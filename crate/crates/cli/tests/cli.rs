use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_equiparam"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn demo_circle_passes_identity_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["demo", "circle", "--out-dir", "."], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
    assert!(dir.path().join("circle.csv").is_file());
    assert!(dir.path().join("circle_invariants.json").is_file());
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["extract", "--bogus"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_parameters_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "evolve",
            "--monitor",
            "phi0",
            "--n2",
            "64",
            "--dt",
            "0.5",
            "-o",
            "s.json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[parameter]:"));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn missing_and_malformed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["extract", "--input", "missing.csv", "-o", "a.json"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("missing.csv"));
    std::fs::write(dir.path().join("bad.csv"), "alpha,x,y\n0,1,zero\n").unwrap();
    let o = run(&["extract", "--input", "bad.csv", "-o", "a.json"], dir.path());
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).starts_with("error[parse]:"));
}

#[test]
fn config_constraints_are_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"curve": {"example": "circle"}, "monitor": "uniform", "n1": 64, "n2": 64, "n3": 32, "dt": 0.1}"#;
    std::fs::write(dir.path().join("bad.cfg"), cfg).unwrap();
    let o = run(&["pipeline", "--config", "bad.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("n3"));
    // The command-line value wins over the file.
    let o = run(
        &["pipeline", "--config", "bad.cfg", "--n3", "128", "--out-dir", "ok"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn pipeline_and_steps_agree() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let cfg = r#"{"curve": {"example": "droplet", "param": 0.6}, "monitor": "phi0",
        "n1": 256, "n2": 128, "n3": 256, "dt": 0.005, "out_dir": "out"}"#;
    std::fs::write(p.join("d.cfg"), cfg).unwrap();
    let o = run(&["pipeline", "--config", "d.cfg"], p);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["invariants.json", "spacing.json", "refined.csv", "report.json"] {
        assert!(p.join("out").join(f).is_file(), "{f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p.join("out/report.json")).unwrap()).unwrap();
    assert!(report["residual"].as_f64().unwrap() < 1e-10);
    assert!(report["min_s_alpha"].as_f64().unwrap() > 0.0);

    // The same run, one step at a time.
    let steps: [&[&str]; 3] = [
        &[
            "evolve",
            "--inv",
            "out/invariants.json",
            "--monitor",
            "phi0",
            "--n2",
            "128",
            "--dt",
            "0.005",
            "-o",
            "s.json",
        ],
        &[
            "resample",
            "--inv",
            "out/invariants.json",
            "--spacing",
            "s.json",
            "--n3",
            "256",
            "-o",
            "r.csv",
        ],
        &[
            "validate",
            "--ref",
            "out/invariants.json",
            "--test",
            "out/invariants.json",
            "-o",
            "v.json",
        ],
    ];
    for args in steps {
        let o = run(args, p);
        assert!(o.status.success(), "{args:?}: {}", stderr(&o));
    }
    let a = std::fs::read_to_string(p.join("r.csv")).unwrap();
    let b = std::fs::read_to_string(p.join("out/refined.csv")).unwrap();
    let rows = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with('#'))
            .map(str::to_owned)
            .collect::<Vec<_>>()
    };
    assert_eq!(rows(&a), rows(&b));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.join("v.json")).unwrap()).unwrap();
    assert_eq!(v["l2_rel"].as_f64(), Some(0.0));
}

#[test]
fn step1_study_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["study", "step1", "--n1", "32,64", "-o", "t.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let t = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(t.starts_with("# study="));
    assert_eq!(t.lines().filter(|l| !l.starts_with('#')).count(), 3);
}

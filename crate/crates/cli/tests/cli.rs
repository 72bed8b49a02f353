use std::path::Path;
use std::process::{Command, Output};

use bistab::analytics::{reconstruct_marginal, BiasSweep};
use bistab::experiments::{bias_sweep, spec_meta, write_outputs, ExperimentSpec};
use bistab::numerics::trapezoid;
use bistab::states::{marginal_from_csv, marginal_to_csv};

fn bistab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bistab")).args(args).output().expect("binary runs")
}

fn data_rows(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).count() - 1
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn analytic_sweep_writes_41_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = bistab(&[
        "sweep", "--state", "fock(5)", "--lambda", "2", "--xi", "1", "--method", "analytic", "--b-min", "-3",
        "--b-max", "3", "--n-b", "41", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(data_rows(&out), 41);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# spec: {")));
}

#[test]
fn state_marginal_is_normalised() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let o = bistab(&["state", "--expr", "coh(1)+coh(-1)", "--marginal", "q", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = marginal_from_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((trapezoid(&m.x, &m.density) - 1.0).abs() < 1e-3);
}

#[test]
fn malformed_state_is_a_usage_error() {
    let o = bistab(&["sweep", "--state", "fock(-1)"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("semantic-error"), "{err}");
    assert!(err.contains("byte 5"), "{err}");

    let o = bistab(&["sweep", "--state", "fock(1", "--lambda", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("syntax-error"));

    assert_eq!(bistab(&["sweep", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(bistab(&[]).status.code(), Some(1));
}

#[test]
fn domain_errors_exit_with_2() {
    // Wigner sampling needs a Gaussian state
    let o = bistab(&["simulate", "--state", "fock(1)", "--lambda", "1.5", "--xi", "0", "--n-traj", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unsupported-representation"), "{}", stderr(&o));

    // the Q filter variance turns negative above λ = 2
    let o = bistab(&["sweep", "--state", "fock(0)", "--lambda", "2.5", "--xi", "1", "--method", "analytic"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("deconvolution-regime-unsupported"), "{}", stderr(&o));
}

#[test]
fn reconstruct_matches_the_library_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("s.csv");
    let rec = dir.path().join("r.csv");
    let o = bistab(&[
        "sweep", "--state", "coh(1)+coh(-1)", "--lambda", "2", "--method", "analytic", "--out",
        sweep.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = bistab(&["reconstruct", "--sweep", sweep.to_str().unwrap(), "--out", rec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let spec = ExperimentSpec::from_json(
        r#"{"state": "coh(1)+coh(-1)", "lambda": 2, "method": "analytic"}"#,
    )
    .unwrap();
    let outcome = bias_sweep(&spec, bistab::analytics::SweepMethod::Analytic).unwrap();
    let meta = spec_meta(&spec);
    assert_eq!(std::fs::read_to_string(&sweep).unwrap(), outcome.sweep.to_csv(&meta));
    let m = reconstruct_marginal(&outcome.sweep, 2.0).unwrap();
    assert_eq!(std::fs::read_to_string(&rec).unwrap(), marginal_to_csv(&m, &meta));

    // and the spec-file pipeline writes the same reconstruction
    let files = write_outputs(&spec, bistab::analytics::SweepMethod::Analytic, &outcome, &dir.path().join("run")).unwrap();
    assert_eq!(std::fs::read(files.reconstruction.unwrap()).unwrap(), std::fs::read(&rec).unwrap());

    // reading the sweep back gives the same numbers
    let back = BiasSweep::from_csv(&std::fs::read_to_string(&sweep).unwrap()).unwrap();
    assert_eq!(back.points, outcome.sweep.points);
}

#[test]
fn seed_determines_stochastic_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = bistab(&[
            "--threads", threads, "sweep", "--state", "fock(1)", "--lambda", "2", "--g", "0.1", "--method", "mc",
            "--n-traj", "300", "--b-min", "-0.5", "--b-max", "0.5", "--n-b", "3", "--seed", seed, "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv", "11", "1");
    let b = run("b.csv", "11", "3");
    let c = run("c.csv", "12", "2");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn threads_fall_back_to_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_bistab"))
        .env("BISTAB_THREADS", "2")
        .args(["state", "--expr", "fock(0)"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_bistab"))
        .env("BISTAB_THREADS", "many")
        .args(["state", "--expr", "fock(0)"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("spec.json");
    std::fs::write(
        &cfg,
        r#"{"state": "fock(0)", "lambda": 1.5, "g": 0.05, "b_grid": {"min": -1, "max": 1, "n": 5}, "method": "analytic"}"#,
    )
    .unwrap();
    let out = dir.path().join("s.csv");
    let o = bistab(&["sweep", "--config", cfg.to_str().unwrap(), "--n-b", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(data_rows(&out), 7);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains(r#""b_grid":{"min":-1.0,"max":1.0,"n":7}"#), "{text}");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"state": "fock(0)", "lambda": 1.5, "sim": {"dt": 0.5}}"#).unwrap();
    assert_eq!(bistab(&["sweep", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn out_dir_holds_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let o = bistab(&[
        "sweep", "--state", "fock(3)", "--lambda", "1.5", "--method", "analytic", "--out-dir", run.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["sweep.csv", "reconstruction.csv", "report.json"] {
        assert!(run.join(f).exists(), "{f}");
    }
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(run.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["spec"]["state"], "fock(3)");
}

#[test]
fn compare_and_jpo_run_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = bistab(&[
        "compare", "--state", "fock(0)", "--lambda", "1.5", "--n-traj", "1000", "--b-min", "-0.4", "--b-max", "0.4",
        "--n-b", "3", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["points"].as_array().unwrap().len(), 3);
    assert_eq!(r["pass"], true);

    let o = bistab(&[
        "jpo", "--state", "fock(1)", "--lambda", "2", "--g", "0.1", "--n-traj", "200", "--b-min", "0", "--b-max", "0",
        "--n-b", "1", "--out", dir.path().join("j.csv").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("rotation = 0.523599"));
}

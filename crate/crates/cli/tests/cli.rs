use std::path::Path;
use std::process::{Command, Output};

use sturm_cli::dataset::{read_dataset, write_dataset, DatasetPaths};
use sturm_cli::report::{read_trace, CvReportFile};
use sturm_cli::strm::read_single;
use sturm_core::harness::stratified_folds;
use sturm_core::{objective_value, SturmConfig};

fn sturm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sturm"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = sturm(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Exit code and the single stderr line of a failing run.
fn fails(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = sturm(dir, args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "expected one line, got {err:?}");
    assert!(err.starts_with("error kind="), "{err}");
    (out.status.code().unwrap(), err)
}

fn stderr_accuracy(out: &Output) -> f64 {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().find(|l| l.starts_with("accuracy=")).expect("accuracy line");
    line["accuracy=".len()..].parse().unwrap()
}

fn synth(dir: &Path, prefix: &str, dims: &str, m: &str, noise: &str, seed: &str) {
    ok(
        dir,
        &[
            "synth", "--dims", dims, "--m", m, "--rank", "2", "--density", "0.2", "--noise", noise, "--seed", seed,
            "--out", prefix,
        ],
    );
}

#[test]
fn fit_then_predict_on_noiseless_data() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "sep", "10x10x10", "100", "0", "42");
    ok(d, &["fit", "--data", "sep", "--tau", "1e-3", "--gamma", "1e-3", "--out", "model.strm"]);
    let out = ok(d, &["predict", "--model", "model.strm", "--data", "sep", "--out", "preds.txt"]);
    let acc = stderr_accuracy(&out);
    assert!(acc >= 0.9, "accuracy {acc}");
    let preds = std::fs::read_to_string(d.join("preds.txt")).unwrap();
    assert_eq!(preds.lines().count(), 100);
    assert!(preds.lines().all(|l| l == "+1" || l == "-1"));
}

#[test]
fn unpenalized_fit_on_consistent_system() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "c", "4x4x4", "20", "0", "1");
    ok(
        d,
        &[
            "fit", "--data", "c", "--tau", "0", "--gamma", "0", "--tol", "0", "--max-iters", "300", "--out", "m.strm",
            "--trace", "t.csv",
        ],
    );
    let trace = read_trace(&d.join("t.csv")).unwrap();
    assert_eq!(trace.len(), 300);
    let first = trace[0].objective.unwrap();
    let last = trace.last().unwrap().objective.unwrap();
    assert!(last <= 1e-6 * first, "{last} vs {first}");
}

#[test]
fn trace_objective_matches_model_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "s", "6x5x4", "30", "0.1", "3");
    let base = ["fit", "--data", "s", "--tau", "0.1", "--gamma", "0.05", "--tol", "0"];
    let mut args = base.to_vec();
    args.extend(["--max-iters", "12", "--out", "full.strm", "--trace", "t.csv"]);
    ok(d, &args);
    let trace = read_trace(&d.join("t.csv")).unwrap();
    let paths = DatasetPaths::from_prefix(&d.join("s"));
    let ds = read_dataset(&paths.tensors, &paths.labels).unwrap();
    let config = SturmConfig::new(0.1, 0.05);
    for k in [1usize, 5, 12] {
        let kk = k.to_string();
        let mut args = base.to_vec();
        args.extend(["--max-iters", &kk, "--out", "snap.strm"]);
        ok(d, &args);
        let w = read_single(&d.join("snap.strm")).unwrap();
        let want = objective_value(&w, &ds, &config).unwrap();
        let got = trace[k - 1].objective.unwrap();
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "iter {k}: {got} vs {want}");
    }
    assert_eq!(
        std::fs::read(d.join("full.strm")).unwrap(),
        std::fs::read(d.join("snap.strm")).unwrap()
    );
}

#[test]
fn singleton_cv_equals_scripted_fits() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "cv", "3x3x3", "40", "0.2", "8");
    std::fs::write(d.join("plan.json"), r#"{"tau_grid":[0.05],"gamma_grid":[0.05],"beta_grid":[1.0],"eta_grid":[100]}"#)
        .unwrap();
    ok(d, &["cv", "--data", "cv", "--plan", "plan.json", "--seed", "11", "--out", "report.json"]);
    let report: CvReportFile = serde_json::from_slice(&std::fs::read(d.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.folds.len(), 10);
    let raw: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("report.json")).unwrap()).unwrap();
    for key in ["fold", "tau", "gamma", "beta", "eta", "accuracy", "sparsity", "iterations"] {
        assert!(raw["folds"][0].get(key).is_some(), "missing {key}");
    }

    let paths = DatasetPaths::from_prefix(&d.join("cv"));
    let ds = read_dataset(&paths.tensors, &paths.labels).unwrap();
    let folds = stratified_folds(ds.labels(), 10, 11, 0).unwrap();
    for (f, test) in folds.iter().enumerate() {
        let train: Vec<usize> = (0..40).filter(|i| !test.contains(i)).collect();
        let tr = DatasetPaths::from_prefix(&d.join(format!("train{f}")));
        let te = DatasetPaths::from_prefix(&d.join(format!("test{f}")));
        write_dataset(&ds.subset(&train).unwrap(), &tr.tensors, &tr.labels).unwrap();
        write_dataset(&ds.subset(test).unwrap(), &te.tensors, &te.labels).unwrap();
        let (trp, tep) = (format!("train{f}"), format!("test{f}"));
        ok(d, &["fit", "--data", &trp, "--tau", "0.05", "--gamma", "0.05", "--out", "fold.strm"]);
        let out = ok(d, &["predict", "--model", "fold.strm", "--data", &tep, "--out", "p.txt"]);
        assert_eq!(stderr_accuracy(&out), report.folds[f].accuracy, "fold {f}");
    }
}

#[test]
fn commands_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "a", "5x4x3", "25", "0.1", "5");
    synth(d, "b", "5x4x3", "25", "0.1", "5");
    assert_eq!(std::fs::read(d.join("a.strm")).unwrap(), std::fs::read(d.join("b.strm")).unwrap());
    for out in ["m1.strm", "m2.strm"] {
        ok(d, &["fit", "--data", "a", "--tau", "0.1", "--gamma", "0.1", "--out", out]);
    }
    assert_eq!(std::fs::read(d.join("m1.strm")).unwrap(), std::fs::read(d.join("m2.strm")).unwrap());
}

#[test]
fn failures_have_distinct_codes_and_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    synth(d, "x", "3x3x2", "30", "0", "2");

    let (code, _) = fails(d, &["fit", "--data", "x", "--tau", "1", "--gamma", "1", "--out", "m", "--frobnicate"]);
    assert_eq!(code, 2);
    let (code, _) = fails(d, &["synth", "--dims", "3by3", "--m", "3", "--rank", "1", "--density", "1", "--out", "q"]);
    assert_eq!(code, 2);

    let (code, _) = fails(d, &["fit", "--data", "missing", "--tau", "1", "--gamma", "1", "--out", "m"]);
    assert_eq!(code, 3);

    let mut bytes = std::fs::read(d.join("x.strm")).unwrap();
    bytes[0] = b'Q';
    std::fs::write(d.join("bad.strm"), &bytes).unwrap();
    std::fs::copy(d.join("x.labels"), d.join("bad.labels")).unwrap();
    let (code, err) = fails(d, &["fit", "--data", "bad", "--tau", "1", "--gamma", "1", "--out", "m"]);
    assert_eq!(code, 4);
    assert!(err.contains("byte offset 0"), "{err}");

    std::fs::copy(d.join("x.strm"), d.join("lab.strm")).unwrap();
    let mut labels = std::fs::read_to_string(d.join("x.labels")).unwrap();
    labels.replace_range(6..8, "2\n");
    std::fs::write(d.join("lab.labels"), labels).unwrap();
    let (code, err) = fails(d, &["fit", "--data", "lab", "--tau", "1", "--gamma", "1", "--out", "m"]);
    assert_eq!(code, 4);
    assert!(err.contains("line 3"), "{err}");

    let (code, _) = fails(d, &["fit", "--data", "x", "--tau=-1", "--gamma", "1", "--out", "m"]);
    assert_eq!(code, 5);

    std::fs::write(d.join("typo.json"), r#"{"tau_gird":[1]}"#).unwrap();
    let (code, _) = fails(d, &["cv", "--data", "x", "--plan", "typo.json", "--out", "r.json"]);
    assert_eq!(code, 5);

    std::fs::write(d.join("many.json"), r#"{"outer_folds":25,"tau_grid":[1],"gamma_grid":[1],"beta_grid":[1],"eta_grid":[100]}"#)
        .unwrap();
    let (code, err) = fails(d, &["cv", "--data", "x", "--plan", "many.json", "--out", "r.json"]);
    assert_eq!(code, 6);
    assert!(err.contains("fewer") || err.contains("at most"), "{err}");
}

#[test]
fn bench_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["bench", "--dims", "4x4x4", "8x4x4", "--m", "5", "--iters", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].contains("median_ms") && lines[2].starts_with("8x4x4"));
}

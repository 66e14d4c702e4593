mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::embed_bin;
use serde_json::Value;

const POINTS: &str = "\
# six points in the plane, lifted
0.0 0.0 0.1
1.0 0.2 0.0
0.3 1.1 0.2
2.0 1.0 0.4
1.5 2.5 0.1
0.2 3.0 0.9
";

fn write_points(dir: &Path) -> PathBuf {
    let path = dir.join("pts.txt");
    std::fs::write(&path, POINTS).unwrap();
    path
}

fn embed(args: &[&str]) -> Output {
    Command::new(embed_bin()).args(args).output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn happy_path_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_points(dir.path());
    let out = dir.path().join("report.json");
    let o = embed(&[
        "--input", input.to_str().unwrap(), "--k", "2", "--iters", "120", "--mode", "pairwise",
        "--baselines", "pca,random", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert_eq!(v["n"], 15);
    assert_eq!((v["d"].as_u64(), v["k"].as_u64()), (Some(3), Some(2)));
    assert_eq!(v["mode"], "pairwise");
    let alg = v["epsilon_alg"].as_f64().unwrap();
    assert!(alg <= v["epsilon_pca"].as_f64().unwrap() + 1e-12);
    assert!(v["epsilon_random"].as_f64().is_some());
    assert!(v["dual_best"].as_f64().unwrap() <= alg + 1e-8);
    assert_eq!(v["runtime_seconds"], Value::Null);
    assert_eq!(v["input_fingerprint"].as_str().unwrap().len(), 64);
}

#[test]
fn zero_iterations_is_pca() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_points(dir.path());
    let out = dir.path().join("report.json");
    let o = embed(&[
        "--input", input.to_str().unwrap(), "--k", "2", "--iters", "0", "--baselines", "pca",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert_eq!(v["epsilon_alg"], v["epsilon_pca"]);
    assert_eq!(v["eta"], Value::Null);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_points(dir.path());
    let input = input.to_str().unwrap();
    for args in [
        vec!["--input", input, "--k", "0"],
        vec!["--input", input, "--k", "4"],
        vec!["--input", input, "--k", "1", "--eta", "-0.1"],
        vec!["--input", input, "--k", "1", "--frobnicate"],
        vec!["--k", "1"],
    ] {
        let o = embed(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn data_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1,2\n3,x\n").unwrap();
    let o = embed(&["--input", bad.to_str().unwrap(), "--k", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let dup = dir.path().join("dup.csv");
    std::fs::write(&dup, "1,2\n3,4\n1,2\n").unwrap();
    let o = embed(&["--input", dup.to_str().unwrap(), "--k", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = embed(&["--input", dup.to_str().unwrap(), "--k", "1", "--dedup"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 2);

    let o = embed(&["--input", "/definitely/not/here.csv", "--k", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn trace_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_points(dir.path());
    let run = |tag: &str| {
        let out = dir.path().join(format!("r{tag}.json"));
        let trace = dir.path().join(format!("t{tag}.csv"));
        let o = embed(&[
            "--input", input.to_str().unwrap(), "--k", "1", "--iters", "25",
            "--baselines", "random", "--seed", "3",
            "--out", out.to_str().unwrap(), "--trace", trace.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        (std::fs::read(out).unwrap(), std::fs::read_to_string(trace).unwrap())
    };
    let (j1, t1) = run("a");
    let (j2, t2) = run("b");
    assert_eq!(j1, j2);
    assert_eq!(t1, t2);
    let lines: Vec<&str> = t1.lines().collect();
    assert_eq!(lines[0], "t,dual_value,primal_epsilon,best_epsilon,degenerate");
    assert_eq!(lines.len() - 1, 25 + 2);
    assert!(lines.last().unwrap().starts_with("avg,"));
}

#[test]
fn rows_mode_and_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_points(dir.path());
    let input = input.to_str().unwrap();
    let o = embed(&["--input", input, "--k", "1", "--mode", "rows", "--iters", "10"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["n"].as_u64(), v["mode"].as_str()), (Some(6), Some("rows")));
    let o = embed(&["--input", input, "--k", "1", "--pair-sample", "7"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 7);
}

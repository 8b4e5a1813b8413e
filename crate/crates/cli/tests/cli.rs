//! Exit codes, config merging and output determinism of the binary.

use std::path::Path;
use std::process::{Command, Output};

use plateau_core::variance::VarianceReport;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plateau-lab"))
        .args(args)
        .env_remove("PLATEAU_LAB_WORKERS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_2_with_one_line() {
    let o = run(&["variance-sweep", "--family", "local-m1", "--n", "2..3"]);
    assert_eq!(code(&o), 2);
    assert_eq!(stderr(&o).trim_end().lines().count(), 1);
    assert!(stderr(&o).contains("samples"));
    assert_eq!(code(&run(&["toy-model", "--bogus"])), 2);
    assert_eq!(code(&run(&["toy-model", "--n", "x"])), 2);
    assert_eq!(code(&run(&["toy-model", "--samples", "50"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"command": "toy-model", "n_min": 5, "n_max": 2}"#).unwrap();
    let o = run(&["--config", path_str(&cfg)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("n_min"));
    std::fs::write(&cfg, r#"{"samples": 200, "sampels": 3}"#).unwrap();
    let o = run(&["toy-model", "--config", path_str(&cfg)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("sampels"));
    assert_eq!(stderr(&o).trim_end().lines().count(), 1);
}

#[test]
fn help_exits_0() {
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("PLATEAU_LAB_WORKERS"));
}

#[test]
fn resource_guard_exits_3_and_flushes_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("guard.csv");
    let o = run(&[
        "variance-sweep",
        "--family",
        "global-deep",
        "--n",
        "8..9",
        "--samples",
        "100",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let report = VarianceReport::read_csv(std::fs::File::open(&out).unwrap()).unwrap();
    assert!(report.rows.is_empty());
}

#[test]
fn partial_rows_survive_the_guard() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("partial.csv");
    let o = run(&[
        "variance-sweep",
        "--family",
        "local-m2",
        "--n",
        "2..6",
        "--samples",
        "100",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 3);
    let report = VarianceReport::read_csv(std::fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(report.rows.iter().map(|r| r.n).collect::<Vec<_>>(), [2, 4]);
}

#[test]
fn output_is_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let bytes = |name: &str, workers: &str, env: bool| {
        let out = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_plateau-lab"));
        cmd.args([
            "toy-model",
            "--samples",
            "300",
            "--seed",
            "9",
            "--out",
            path_str(&out),
        ]);
        if env {
            cmd.env("PLATEAU_LAB_WORKERS", workers);
        } else {
            cmd.args(["--workers", workers])
                .env_remove("PLATEAU_LAB_WORKERS");
        }
        assert!(cmd.output().unwrap().status.success());
        std::fs::read(&out).unwrap()
    };
    let one = bytes("a.csv", "1", false);
    assert_eq!(one, bytes("b.csv", "3", false));
    assert_eq!(one, bytes("c.csv", "2", true));
    let text = String::from_utf8(one).unwrap();
    assert!(!text.contains("workers") && !text.contains("a.csv"));
    let report = VarianceReport::read_csv(text.as_bytes()).unwrap();
    assert_eq!(report.rows.len(), 8);
    assert!(report
        .rows
        .iter()
        .all(|r| r.exact_value.is_some() && r.wall_time_ms.is_none()));
    // no temporary files left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 3);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"command": "matrix-flow", "n_min": 2, "n_max": 2, "samples": 100, "seed": 4, "format": "json"}"#)
        .unwrap();
    let o = run(&[
        "--config",
        path_str(&cfg),
        "--samples",
        "120",
        "--cost",
        "local",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["meta"]["config"]["samples"], 120);
    assert_eq!(v["meta"]["config"]["seed"], 4);
    assert_eq!(v["rows"][0]["samples"], 120);
    assert_eq!(v["rows"][0]["cost_kind"], "local");
    assert_eq!(v["rows"][0]["scheme"], "matrix-flow");
    assert!(v["rows"][0]["bound_value"].is_number());
}

#[test]
fn embedded_config_reruns_to_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let o = run(&[
        "variance-sweep",
        "--family",
        "local-m1,global-deep",
        "--cost",
        "both",
        "--n",
        "2",
        "--samples",
        "100",
        "--seed",
        "3",
        "--out",
        path_str(&first),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = VarianceReport::read_csv(std::fs::File::open(&first).unwrap()).unwrap();
    let cfg = dir.path().join("again.json");
    std::fs::write(&cfg, serde_json::to_string(&report.meta.config).unwrap()).unwrap();
    let second = dir.path().join("second.csv");
    assert_eq!(
        code(&run(&[
            "--config",
            path_str(&cfg),
            "--out",
            path_str(&second)
        ])),
        0
    );
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap()
    );
}

#[test]
fn verification_failures_exit_1() {
    // the commutator average over the stated support is not zero
    let o = run(&["verify-moments", "--samples", "5000", "--seed", "11"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let failing: Vec<&str> = text.lines().filter(|l| l.ends_with(",false")).collect();
    assert_eq!(failing.len(), 1);
    assert!(failing[0].starts_with("commutator-average-zero,"));
}

#[test]
fn bound_table_lists_each_n() {
    let o = run(&["bound-table", "--n", "1..3"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        rows[0],
        "n,bound_rpqc_global,bound_rpqc_local,bound_matrix_flow,toy_global,toy_local"
    );
    assert!(rows[1].starts_with("1,0.1422222222222222"));
    assert_eq!(rows.len(), 4);
}

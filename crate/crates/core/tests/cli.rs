//! End-to-end runs of the `sparse-ekr` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparse-ekr"))
        .args(args)
        .env_remove("SPARSE_EKR_WORKERS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn ekr_report() {
    let v = json(&["ekr", "--n", "5", "--k", "2"]);
    assert_eq!(
        (
            v["alpha"].as_u64(),
            v["equals_ekr"].as_bool(),
            v["only_stars"].as_bool()
        ),
        (Some(4), Some(true), Some(true))
    );
}

#[test]
fn stats_report() {
    let v = json(&[
        "stats",
        "--n",
        "5",
        "--k",
        "2",
        "--family",
        "antistar:5",
        "--l",
        "1",
    ]);
    assert_eq!(v["size"], 6);
    assert_eq!(v["dp"], 3);
    assert_eq!(v["alpha"].as_f64(), Some(-0.5));
    assert_eq!(v["beta"].as_f64(), Some(0.375));
    assert_eq!(v["alpha_exact"], "-1/2");
}

#[test]
fn bounds_report() {
    let v = json(&["bounds", "--n", "12", "--k", "2", "--zeta", "1.0"]);
    assert!((v["p_c"].as_f64().unwrap() - 0.72137).abs() < 2e-5);
    assert!((v["p_0"].as_f64().unwrap() - 0.55167).abs() < 1e-5);
}

#[test]
fn every_report_has_a_schema_version() {
    let cases: [&[&str]; 7] = [
        &["stats", "--n", "7", "--k", "2", "--family", "star:1"],
        &[
            "spectrum",
            "--n",
            "7",
            "--k",
            "2",
            "--family",
            "union:1,2",
            "--cross-check",
        ],
        &["removal", "--n", "9", "--k", "2", "--family", "random:30:5"],
        &["ekr", "--n", "6", "--k", "2"],
        &["baranyai", "--n", "6", "--k", "2", "--extremal"],
        &["threshold", "--n", "7", "--k", "2", "--trials", "50"],
        &["bounds", "--n", "9", "--k", "2"],
    ];
    for args in cases {
        let v = json(args);
        assert_eq!(v["schema_version"], 1, "{args:?}");
        assert_eq!(v["command"], args[0]);
    }
    let v = json(&[
        "simulate", "--n", "6", "--k", "2", "--p", "0.5", "--trials", "20", "--format", "json",
    ]);
    assert_eq!(
        (v["schema_version"].as_u64(), v["seed"].as_u64()),
        (Some(1), Some(42))
    );
}

#[test]
fn simulate_csv_is_reproducible_and_prints_the_seed() {
    let args = [
        "simulate", "--n", "7", "--k", "2", "--p", "0.3,0.8", "--trials", "200",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains("seed=42"));
    assert_eq!(
        lines.next(),
        Some("p,trials,successes,fraction,ci_lo,ci_hi,mean_X")
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn workers_env_does_not_change_output() {
    let args = [
        "simulate", "--n", "8", "--k", "2", "--p", "0.6", "--trials", "300", "--seed", "9",
    ];
    let base = run(&args).stdout;
    let env = Command::new(env!("CARGO_BIN_EXE_sparse-ekr"))
        .args(args)
        .env("SPARSE_EKR_WORKERS", "3")
        .output()
        .unwrap();
    assert!(env.status.success());
    assert_eq!(base, env.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ekr.json");
    let out = run(&[
        "ekr",
        "--n",
        "5",
        "--k",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["alpha"], 4);
}

#[test]
fn family_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.txt");
    std::fs::write(&path, "n=6 k=2\n1,2\n3,4\n5,6\n").unwrap();
    let spec = format!("file:{}", path.display());
    let v = json(&["stats", "--n", "6", "--k", "2", "--family", &spec]);
    assert_eq!((v["size"].as_u64(), v["dp"].as_u64()), (Some(3), Some(3)));
    let out = run(&["stats", "--n", "7", "--k", "2", "--family", &spec]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_statuses() {
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
    assert_eq!(
        run(&["stats", "--n", "5", "--k", "2", "--family", "star:9"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["baranyai", "--n", "7", "--k", "2"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["ekr", "--n", "40", "--k", "5"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

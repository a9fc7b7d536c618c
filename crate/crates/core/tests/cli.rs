use std::path::Path;
use std::process::{Command, Output};

use darpsv::fixtures::ride_rounding;
use darpsv::gen::{benchmark_text, random_instance, RandomParams};
use darpsv::instance::Instance;

fn darpsv(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_darpsv"))
        .args(args)
        .current_dir(dir)
        .env_remove("DARPSV_BACKEND")
        .output()
        .expect("binary runs")
}

fn write_instance(dir: &Path, name: &str, inst: &Instance) {
    std::fs::write(dir.join(name), inst.to_json().unwrap()).unwrap();
}

#[test]
fn solve_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(
        dir.path(),
        "r.json",
        &random_instance(
            5,
            &RandomParams {
                n: 3,
                ..RandomParams::default()
            },
        ),
    );
    for f in ["abf", "ebf", "tsef", "tsfrag"] {
        let mut args = vec!["solve", "r.json", "--formulation", f, "--out", "s.json"];
        if f.starts_with("ts") {
            args.push("--ddd");
        }
        let out = darpsv(&args, dir.path());
        assert_eq!(
            out.status.code(),
            Some(0),
            "{f}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = std::fs::read_to_string(dir.path().join("s.json")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in [
            "objective",
            "bound",
            "status",
            "routes",
            "sync_groups",
            "stats",
        ] {
            assert!(v.get(key).is_some(), "{key} missing");
        }
        for key in ["|V_E|", "|A_E|", "|F|", "cuts", "iterations"] {
            assert!(v["stats"].get(key).is_some(), "{key} missing");
        }
        let out = darpsv(&["validate", "r.json", "s.json"], dir.path());
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn ddd_prints_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(
        dir.path(),
        "r.json",
        &random_instance(
            11,
            &RandomParams {
                n: 4,
                ..RandomParams::default()
            },
        ),
    );
    let out = darpsv(
        &["solve", "r.json", "--formulation", "tsfrag", "--ddd"],
        dir.path(),
    );
    let err = String::from_utf8_lossy(&out.stderr);
    let line = err.lines().find(|l| l.contains("1, ")).expect("trace line");
    let fields: Vec<&str> = line.rsplit("] ").next().unwrap().split(", ").collect();
    assert_eq!(fields.len(), 5, "{line}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(dir.path(), "ride.json", &ride_rounding());
    let code = |args: &[&str]| darpsv(args, dir.path()).status.code();
    assert_eq!(
        code(&[
            "solve",
            "ride.json",
            "--formulation",
            "tsef",
            "--resolution",
            "10"
        ]),
        Some(1)
    );
    assert_eq!(
        code(&["solve", "ride.json", "--formulation", "nope"]),
        Some(2)
    );
    assert_eq!(
        code(&["solve", "ride.json", "--formulation", "abf", "--ddd"]),
        Some(2)
    );
    assert_eq!(code(&["solve", "ride.json", "--bogus"]), Some(2));
    assert_eq!(code(&["solve", "ride.json", "--backend", "nope"]), Some(2));
    let env = Command::new(env!("CARGO_BIN_EXE_darpsv"))
        .args(["solve", "ride.json"])
        .current_dir(dir.path())
        .env("DARPSV_BACKEND", "nope")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(2));
    // a broken solution file is rejected
    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"objective": 1.0, "bound": 1.0, "status": "optimal", "routes": [], "sync_groups": [],
            "stats": {"|V_E|": null, "|A_E|": null, "|F|": null, "cuts": 0, "iterations": 1, "seconds": 0.0},
            "method": "x", "approximate": false}"#,
    )
    .unwrap();
    assert_eq!(code(&["validate", "ride.json", "bad.json"]), Some(1));
}

#[test]
fn bench_and_dataset_generation() {
    let dir = tempfile::tempdir().unwrap();
    let out = darpsv(&["bench", "--methods", "ebf"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 1);

    std::fs::write(
        dir.path().join("a4-16.txt"),
        benchmark_text(2, 4, 16, false),
    )
    .unwrap();
    let out = darpsv(
        &[
            "gen-dataset",
            "a4-16.txt",
            "--dataset",
            "set2",
            "--large-fraction",
            "0.3333333333333333",
            "--pickup-window",
            "15",
            "--ride-factor",
            "1.5,2.0",
            "--out-dir",
            "gen",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let files: Vec<String> = String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(files.len(), 2);
    for f in &files {
        let text = std::fs::read_to_string(dir.path().join(f)).unwrap();
        let inst = Instance::from_json(&text).unwrap();
        assert_eq!(inst.to_json().unwrap(), text);
        assert_eq!(inst.fleet, 16);
    }
    let out = darpsv(
        &[
            "bench",
            &files[0],
            &files[1],
            "--methods",
            "ebf,tsfrag+ddd",
            "--parallel",
            "2",
            "--out",
            "b.csv",
            "--json",
            "b.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let json = std::fs::read_to_string(dir.path().join("b.jsonl")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert_eq!(json.lines().count(), 4);
    let objs: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(11).unwrap())
        .collect();
    assert_eq!(objs[0], objs[1]);
    assert_eq!(objs[2], objs[3]);
}

#[test]
fn dumps() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(dir.path(), "ride.json", &ride_rounding());
    let out = darpsv(&["net", "dump-fragments", "ride.json"], dir.path());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("fragments 1"));
    let out = darpsv(&["net", "dump-events", "ride.json"], dir.path());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("events "));
    let out = darpsv(&["inst", "dump", "ride.json"], dir.path());
    let inst = Instance::from_json(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(inst.n, 2);
    let out = darpsv(
        &["solve", "ride.json", "--formulation", "ebf", "--lp", "m.lp"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let lp = std::fs::read_to_string(dir.path().join("m.lp")).unwrap();
    assert!(lp.contains("Minimize") && lp.contains("Subject To") && lp.trim_end().ends_with("End"));
}

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_filter-games"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn exit_codes_follow_error_classes() {
    let cases: &[(&[&str], i32)] = &[
        (&["--help"], 0),
        (
            &[
                "play",
                "--game",
                "g9",
                "--one",
                "copy",
                "--two",
                "copy",
                "--horizon",
                "2",
            ],
            2,
        ),
        (&["play", "--game", "g1"], 2),
        (
            &[
                "extract-g",
                "--one",
                "maxplus:1",
                "--upto",
                "30",
                "--no-fast-path",
            ],
            3,
        ),
        (&["build-gh", "--one", "maxplus:2", "--upto", "0"], 4),
        (
            &["defeat-one", "--one", "maxplus:1", "--oracle", "frechet"],
            4,
        ),
        (
            &[
                "check",
                "enum-bounded",
                "--filter",
                "frechet",
                "--g",
                "2k",
                "--bases",
                "9..3",
            ],
            2,
        ),
    ];
    for (args, code) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(*code), "{args:?}");
        if *code != 0 {
            assert!(
                String::from_utf8_lossy(&out.stderr).starts_with("error"),
                "{args:?}"
            );
        }
    }
}

#[test]
fn outputs_are_json_documents() {
    let v = json(&[
        "play",
        "--game",
        "g2",
        "--one",
        "maxplus:1",
        "--two",
        "offset:2",
        "--horizon",
        "10",
    ]);
    assert_eq!(v["verdict"]["domination_index"], 1);
    let v = json(&[
        "check",
        "enum-bounded",
        "--filter",
        "frechet",
        "--g",
        "2k",
        "--bases",
        "1..10",
        "--scan",
        "100",
    ]);
    assert_eq!(v["all_pass"], true);
    let v = json(&["defeat-one", "--one", "maxplus:5", "--horizon", "100"]);
    assert_eq!(v["chain_ok"], true);
    let v = json(&[
        "refute-two",
        "--two",
        "copy",
        "--budget",
        "50",
        "--horizon",
        "40",
    ]);
    assert_eq!(v["evidence"]["kind"], "DirectDefeat");
    assert_eq!(v["verdicts"].as_array().unwrap().len(), 3);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gh.json");
    let out = run(&[
        "build-gh",
        "--one",
        "maxplus:2",
        "--upto",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["h"][2], 87);
}

#[test]
fn batch_keeps_input_order_and_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.conf");
    let bad = dir.path().join("bad.conf");
    std::fs::write(&good, "command=steal\ntwo=offset:1\nhorizon=3\n").unwrap();
    std::fs::write(&bad, "command=steal\ntwo=nonsense\nhorizon=3\n").unwrap();
    let (g, b) = (good.to_str().unwrap(), bad.to_str().unwrap());
    let v = json(&["batch", "--jobs", "3", b, g, b, g]);
    let codes: Vec<i64> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["exit_code"].as_i64().unwrap())
        .collect();
    assert_eq!(codes, vec![2, 0, 2, 0]);
    assert_eq!(v[1]["output"]["interleaving_ok"], true);
}

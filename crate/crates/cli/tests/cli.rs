use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn vicious(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vicious"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vicious-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn transfer_from_weights_file() {
    let ws = scratch("ws.json", r#"{"L": 3}"#);
    let out = vicious(&[
        "transfer",
        "--weights",
        ws.to_str().unwrap(),
        "--yi",
        "1,3",
        "--yf",
        "1,3",
        "--t",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["value"], "1/1");
    assert_eq!(v["method"], "transfer");
    assert_eq!(v["inputs"]["L"], 3);
    assert!(v.get("elapsed_seconds").is_none());
}

#[test]
fn weights_file_values_are_used() {
    let ws = scratch(
        "heavy.json",
        r#"{"L": 3, "up": {"0": "1/2"}, "initial": {"0": 3}}"#,
    );
    let out = vicious(&[
        "gv",
        "--weights",
        ws.to_str().unwrap(),
        "--yi",
        "0",
        "--yf",
        "1",
        "--t",
        "1",
    ]);
    assert_eq!(json(&out)["value"], "3/2");
}

#[test]
fn all_exact_methods_agree() {
    let common = [
        "--seed", "4", "--L", "7", "--yi", "0,2,4", "--yf", "1,3,7", "--t", "5",
    ];
    let values: Vec<Value> = ["enumerate", "transfer", "gv"]
        .iter()
        .map(|m| {
            let mut args = vec![*m];
            args.extend(common);
            json(&vicious(&args))["value"].clone()
        })
        .collect();
    assert_eq!(values[0], values[1]);
    assert_eq!(values[1], values[2]);
}

#[test]
fn enumerate_lists_families() {
    let out = vicious(&[
        "enumerate",
        "--uniform",
        "--L",
        "3",
        "--yi",
        "1,3",
        "--yf",
        "1,3",
        "--t",
        "2",
    ]);
    let v = json(&out);
    assert_eq!(v["count"], 1);
    assert_eq!(v["families"], serde_json::json!([[[1, 0, 1], [3, 2, 3]]]));
}

#[test]
fn spectral_reports_complex_pair_and_residual() {
    let out = vicious(&[
        "spectral",
        "--uniform",
        "--L",
        "5",
        "--yi",
        "1",
        "--yf",
        "1",
        "--t",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["value"], "5/1");
    assert!((v["spectral"]["re"].as_f64().unwrap() - 5.0).abs() < 1e-9);
    assert!(v["spectral"]["im"].as_f64().unwrap().abs() < 1e-9);
    assert!(v["spectral"]["residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn one_wall_uses_threshold_width() {
    let out = vicious(&[
        "gv",
        "--one-wall",
        "--uniform",
        "--yi",
        "1",
        "--yf",
        "1",
        "--t",
        "4",
    ]);
    let v = json(&out);
    assert_eq!(v["value"], "5/1");
    assert_eq!(v["inputs"]["L"], 5);
    assert_eq!(v["one_wall"], true);
}

#[test]
fn verify_small_uniform() {
    let out = vicious(&["verify", "--L", "3", "--N", "2", "--t", "2", "--uniform"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["all_equal"], true);
    assert_eq!(v["passed"], true);
    assert_eq!(v["spectral"]["status"], "ok");
    for r in v["spectral"]["bethe"]["relations"].as_array().unwrap() {
        assert!(r["max_residual"].as_f64().unwrap() < 1e-9, "{r}");
    }
}

#[test]
fn verify_single_pair() {
    let out = vicious(&[
        "verify", "--seed", "2", "--L", "5", "--N", "2", "--t", "3", "--yi", "0,2", "--yf", "1,3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pairs"], 1);
}

#[test]
fn verify_fails_with_tiny_tolerance() {
    let out = vicious(&[
        "verify", "--seed", "9", "--L", "5", "--N", "2", "--t", "3", "--tol", "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["all_equal"], true);
    assert_eq!(v["passed"], false);
    assert_eq!(v["spectral"]["status"], "failed");
}

#[test]
fn incomplete_spectrum_is_excluded_not_failed() {
    // w(0,1) = 0 makes a two-step eigenvalue vanish
    let ws = scratch("zero.json", r#"{"L": 3, "up": {"0": 0}}"#);
    let out = vicious(&[
        "verify",
        "--weights",
        ws.to_str().unwrap(),
        "--N",
        "1",
        "--t",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["all_equal"], true);
    assert_eq!(v["spectral"]["status"], "excluded");
    assert!(v["spectral"]["reason"].is_string());

    let out = vicious(&[
        "spectral",
        "--weights",
        ws.to_str().unwrap(),
        "--yi",
        "1",
        "--yf",
        "1",
        "--t",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["error"]["kind"], "degenerate_spectrum");
}

#[test]
fn parity_mismatch_is_exit_two() {
    let out = vicious(&[
        "gv",
        "--yi",
        "1",
        "--yf",
        "2",
        "--t",
        "2",
        "--uniform",
        "--L",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "parity_mismatch");
    assert!(v["error"]["message"].as_str().unwrap().contains("parity"));
}

#[test]
fn domain_errors_are_exit_two() {
    for args in [
        [
            "transfer",
            "--uniform",
            "--L",
            "4",
            "--yi",
            "1",
            "--yf",
            "1",
            "--t",
            "2",
        ],
        [
            "transfer",
            "--uniform",
            "--L",
            "3",
            "--yi",
            "3,1",
            "--yf",
            "1,3",
            "--t",
            "2",
        ],
        [
            "transfer",
            "--uniform",
            "--L",
            "3",
            "--yi",
            "1,2",
            "--yf",
            "1,3",
            "--t",
            "2",
        ],
        [
            "transfer",
            "--uniform",
            "--L",
            "3",
            "--yi",
            "5",
            "--yf",
            "5",
            "--t",
            "2",
        ],
    ] {
        let out = vicious(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(json(&out)["error"]["kind"].is_string());
    }
}

#[test]
fn parse_and_config_errors_are_exit_one() {
    let out = vicious(&[
        "transfer",
        "--uniform",
        "--L",
        "3",
        "--yi",
        "1",
        "--yf",
        "1",
        "--t",
        "two",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "usage");

    let out = vicious(&["transfer", "--yi", "1", "--yf", "1", "--t", "2"]);
    assert_eq!(out.status.code(), Some(1));

    let bad = scratch("bad.json", r#"{"L": 3, "sideways": {}}"#);
    let out = vicious(&[
        "transfer",
        "--weights",
        bad.to_str().unwrap(),
        "--yi",
        "1",
        "--yf",
        "1",
        "--t",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "config");

    let out = vicious(&[
        "transfer",
        "--weights",
        "/nonexistent/w.json",
        "--yi",
        "1",
        "--yf",
        "1",
        "--t",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "io");
}

#[test]
fn help_exits_zero() {
    assert_eq!(vicious(&["--help"]).status.code(), Some(0));
    assert_eq!(vicious(&["bench", "--help"]).status.code(), Some(0));
}

#[test]
fn timing_is_opt_in() {
    let out = vicious(&[
        "transfer",
        "--uniform",
        "--L",
        "3",
        "--yi",
        "1",
        "--yf",
        "1",
        "--t",
        "2",
        "--timing",
    ]);
    assert!(json(&out)["elapsed_seconds"].as_f64().is_some());
}

#[test]
fn csv_value_output() {
    let out = vicious(&[
        "transfer",
        "--uniform",
        "--L",
        "3",
        "--yi",
        "1",
        "--yf",
        "1",
        "--t",
        "2",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "method,L,N,t,yi,yf,value,re,im,residual");
    assert_eq!(lines[1], "transfer,3,1,2,1,1,2/1,,,");
}

#[test]
fn bench_grid() {
    let out = vicious(&["bench", "--L", "5", "--N", "2", "--t", "2,4,6,40"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "L,N,t,method,value,seconds,status");
    assert_eq!(lines.len(), 1 + 4 * 4);
    for t in ["2", "4", "6"] {
        let cell: Vec<Vec<&str>> = lines[1..]
            .iter()
            .map(|l| l.split(',').collect::<Vec<_>>())
            .filter(|f| f[2] == t)
            .collect();
        assert_eq!(cell.len(), 4);
        assert!(cell.iter().all(|f| f[6] == "ok"), "{cell:?}");
        assert_eq!(cell[0][4], cell[1][4]);
        assert_eq!(cell[1][4], cell[2][4]);
    }
    assert!(lines.contains(&"5,2,40,enumerate,,,skipped"));
}

#[test]
fn empty_bench_grid() {
    let out = vicious(&["bench"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "L,N,t,method,value,seconds,status\n"
    );
}

#[test]
fn bench_marks_oversized_cells() {
    let out = vicious(&["bench", "--L", "3", "--N", "3", "--t", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",invalid")));
}

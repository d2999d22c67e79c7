use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn fredholm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fredholm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn report<'a>(reports: &'a Value, name: &str) -> &'a Value {
    reports
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == name)
        .unwrap_or_else(|| panic!("no {name} report"))
}

#[test]
fn pair_report_w2() {
    let out = fredholm(&["pair-report", data("w2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout_json(&out),
        json!({"a":0,"b":0,"c":0,"d":1,"index":1,"dim_range_st":0,"dim_range_ts":1})
    );
}

#[test]
fn pair_report_zero_maps() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_temp(
        &dir,
        "z.json",
        r#"{"dim_x":3,"dim_y":1,"s":[[0,0,0]],"t":[[0],[0],[0]]}"#,
    );
    let out = fredholm(&["pair-report", &file]);
    assert_eq!(stdout_json(&out)["index"], 2);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"dim_x":1,"dim_y":1,"s":[["1/0"]],"t":[[0]]}"#,
        r#"{"dim_x":2,"dim_y":1,"s":[[1]],"t":[[0],[1]]}"#,
        r#"{"dim_x":1,"dim_y":1,"s":[[1]]"#,
        r#"{"something":"else"}"#,
    ];
    for (i, body) in cases.iter().enumerate() {
        let file = write_temp(&dir, &format!("bad{i}.json"), body);
        for cmd in ["pair-report", "verify"] {
            let out = fredholm(&[cmd, &file]);
            assert_eq!(out.status.code(), Some(2), "{cmd} {body}");
            assert!(out.stdout.is_empty());
            assert!(!out.stderr.is_empty());
        }
    }
    let missing = fredholm(&["pinv", "/nonexistent/matrix.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(fredholm(&["bogus"]).status.code(), Some(2));
}

#[test]
fn verify_w2_thm34() {
    let out = fredholm(&["verify", "--thm34", data("w2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let reports = stdout_json(&out);
    assert_eq!(reports.as_array().unwrap().len(), 1);
    let r = report(&reports, "theorem_3_4");
    assert_eq!(r["passed"], true);
    assert_eq!(r["details"]["index_pair"], 1);
    assert_eq!(r["details"]["index_s_plus_t_prime"], 1);
    assert_eq!(r["details"]["index_t_plus_s_prime"], -1);
}

#[test]
fn verify_w2_thm36_matrices() {
    let out = fredholm(&["verify", "--thm36", data("w2.json").to_str().unwrap()]);
    let reports = stdout_json(&out);
    let d = &report(&reports, "theorem_3_6")["details"];
    assert_eq!(d["v"], json!([[0, 0, 1], [0, 0, 1], [1, 0, 0]]));
    assert_eq!(d["nullity_quotient_laplacian_x"], 0);
    assert_eq!(d["nullity_quotient_laplacian_y"], 0);
}

#[test]
fn chain_flags_rejected_for_pairs() {
    let out = fredholm(&["verify", "--thm44", data("w2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // --all on a pair quietly restricts itself to the pair verifiers.
    let out = fredholm(&["verify", "--all", data("w2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<_> = stdout_json(&out)
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["name"].as_str().unwrap().to_owned())
        .collect();
    assert_eq!(names, ["theorem_3_2", "theorem_3_4", "theorem_3_6"]);
}

#[test]
fn chain_reports_and_verify() {
    let cases = [
        ("exact_complex.json", json!([0, 0, 0]), 0),
        ("zero_map.json", json!([1, 1]), 0),
        ("non_complex.json", json!([0, -1, 0]), 1),
    ];
    for (file, d, index) in cases {
        let path = data(file);
        let out = fredholm(&["chain-report", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let v = stdout_json(&out);
        assert_eq!(v["d"], d, "{file}");
        assert_eq!(v["index"], index, "{file}");
        assert_eq!(v["euler_characteristic"], index, "{file}");

        let out = fredholm(&["verify", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{file}");
        let reports = stdout_json(&out);
        assert_eq!(reports.as_array().unwrap().len(), 6);
        assert!(reports
            .as_array()
            .unwrap()
            .iter()
            .all(|r| r["passed"] == true));
    }
}

#[test]
fn exact_complex_operators() {
    let out = fredholm(&[
        "verify",
        "--thm42",
        "--thm44",
        data("exact_complex.json").to_str().unwrap(),
    ]);
    let reports = stdout_json(&out);
    assert_eq!(
        report(&reports, "theorem_4_2")["details"]["even"],
        json!([[0, 1], [1, 0]])
    );
    let d44 = &report(&reports, "theorem_4_4")["details"];
    assert_eq!(d44["nullity_laplacian_1"], 0);
    assert_eq!(d44["a_1"], 0);
}

#[test]
fn pinv_examples() {
    let dir = tempfile::tempdir().unwrap();
    for (body, expected) in [
        ("[[2]]", json!([["1/2"]])),
        ("[[1,1]]", json!([["1/2"], ["1/2"]])),
        ("[[0,0,0],[0,0,0]]", json!([[0, 0], [0, 0], [0, 0]])),
    ] {
        let file = write_temp(&dir, "m.json", body);
        let out = fredholm(&["pinv", &file]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout_json(&out), expected, "{body}");
    }
}

#[test]
fn fuzz_lines_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let failures = dir.path().join("failures");
    let out = fredholm(&[
        "fuzz",
        "--seed",
        "3",
        "--count",
        "6",
        "--max-dim",
        "4",
        "--failures-dir",
        failures.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 7);
    for (i, line) in lines[..6].iter().enumerate() {
        assert_eq!(line["ordinal"], i);
        assert_eq!(line["kind"], if i % 2 == 0 { "pair" } else { "chain" });
        assert_eq!(line["passed"], true);
        assert_eq!(line["seed"], fredholm_core::instance_seed(3, i as u64));
    }
    assert_eq!(
        lines[6]["summary"],
        json!({"seed":3,"count":6,"passed":6,"failed":0})
    );
    assert!(!failures.exists());
}

#[test]
fn fuzz_instances_replay_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = fredholm(&["fuzz", "--seed", "11", "--count", "4", "--max-dim", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().take(4) {
        let v: Value = serde_json::from_str(line).unwrap();
        let file = write_temp(&dir, "instance.json", &v["instance"].to_string());
        let replay = fredholm(&["verify", &file]);
        assert_eq!(replay.status.code(), Some(0));
        assert_eq!(stdout_json(&replay), v["reports"]);
    }
}

#[test]
fn fuzz_zero_count() {
    let out = fredholm(&["fuzz", "--count", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["summary"]["count"], 0);
}

#[test]
fn fuzz_rejects_bad_config() {
    let out = fredholm(&["fuzz", "--max-dim", "2", "--rank-budget", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn human_view_keeps_stdout_json() {
    let out = fredholm(&[
        "--human",
        "verify",
        data("non_complex.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    stdout_json(&out);
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("theorem_4_4"));
}

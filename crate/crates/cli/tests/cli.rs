use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn lfd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lfd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = lfd(args);
    assert!(out.status.success(), "{args:?} failed: {}", stderr(&out));
    stdout(&out)
}

fn exact_column(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect()
}

#[test]
fn coeffs_examples() {
    assert_eq!(
        exact_column(&ok(&["coeffs", "-a", "1/2", "-l", "1/4", "-n", "4"])),
        ["1/1", "-1/2", "1/16", "0/1", "0/1"]
    );
    assert_eq!(
        exact_column(&ok(&["coeffs", "-a", "0", "-l", "1", "-n", "2"])),
        ["1/1", "0/1", "0/1"]
    );
    assert_eq!(
        exact_column(&ok(&["coeffs", "-a", "-1/2", "-l", "1/4", "-n", "4"])),
        ["1/1", "1/2", "3/16", "1/16", "5/256"]
    );
}

#[test]
fn coeffs_rows_carry_float_values() {
    let out = ok(&[
        "coeffs", "-a", "-1/2", "-l", "1/4", "-n", "4", "--mode", "float",
    ]);
    let last = out.lines().last().unwrap();
    assert_eq!(last, "4,5/256,0.01953125");
}

#[test]
fn apply_backward_difference() {
    assert_eq!(
        ok(&["apply", "-a", "1", "-l", "1", "--x", "3,5,9"]),
        "0,3/1\n1,2/1\n2,4/1\n"
    );
}

#[test]
fn compose_matches_summed_order() {
    let composed = ok(&[
        "compose",
        "-a",
        "1/3",
        "-b",
        "-5/6",
        "-l",
        "2/7",
        "--x",
        "1,-2,3/4,5",
    ]);
    let direct = ok(&["apply", "-a", "-1/2", "-l", "2/7", "--x", "1,-2,3/4,5"]);
    assert_eq!(composed, direct);
}

#[test]
fn transform_and_matrix() {
    let args = ["-a", "1/2", "-l", "1/4", "--v", "1,2,4"];
    let y = ok(&[&["transform"][..], &args, &["--x", "1,1,1"]].concat());
    assert_eq!(y, "0,1/1\n1,2/1\n2,17/4\n");
    let c = ok(&[&["transform"][..], &args, &["--matrix"]].concat());
    assert_eq!(c, "0,0,1/1\n1,1,2/1\n2,0,1/4\n2,2,4/1\n");
    assert_eq!(
        ok(&[&["norm"][..], &args, &["--x", "1,1,1"]].concat()),
        "17/4\n"
    );
}

#[test]
fn transform_then_reconstruct_roundtrips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let x = "3/7,-2,0,5/11,1/3,-9/8";
    let problem = dir.path().join("problem.json");
    fs::write(
        &problem,
        format!(r#"{{"a": "2/3", "l": "-1/5", "v": ["1/2", 3, "-7/4", 2, "5/9", 1], "x": [{}], "mode": "exact"}}"#,
            x.split(',').map(|t| format!("\"{t}\"")).collect::<Vec<_>>().join(",")),
    )
    .unwrap();
    let problem = problem.to_str().unwrap();
    let y = ok(&["transform", "-p", problem]);
    let y_path = dir.path().join("y.csv");
    fs::write(&y_path, &y).unwrap();
    let back = ok(&[
        "reconstruct",
        "-p",
        problem,
        "--y",
        &format!("@{}", y_path.display()),
    ]);
    assert_eq!(back, "0,3/7\n1,-2/1\n2,0/1\n3,5/11\n4,1/3\n5,-9/8\n");

    // the JSON form reads back too
    let yj = ok(&["transform", "-p", problem, "--json"]);
    let yj_path = dir.path().join("y.json");
    fs::write(&yj_path, &yj).unwrap();
    let back_json = ok(&[
        "reconstruct",
        "-p",
        problem,
        "--y",
        &format!("@{}", yj_path.display()),
    ]);
    assert_eq!(back_json, back);
}

#[test]
fn serialization_is_canonical_and_idempotent() {
    let first = ok(&[
        "apply",
        "-a",
        "0",
        "-l",
        "1",
        "--x",
        "2/4,0.5,-6/-3,1.25e1,-0",
    ]);
    assert_eq!(first, "0,1/2\n1,1/2\n2,2/1\n3,25/2\n4,0/1\n");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    fs::write(&path, &first).unwrap();
    let second = ok(&[
        "apply",
        "-a",
        "0",
        "-l",
        "1",
        "--x",
        &format!("@{}", path.display()),
    ]);
    assert_eq!(first, second);
}

#[test]
fn malformed_input_names_the_field() {
    let out = lfd(&["apply", "-a", "1", "-l", "1", "--x", "1,abc"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("`x[1]`"), "{}", stderr(&out));

    let out = lfd(&["apply", "-a", "1/0", "-l", "1", "--x", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("`a`"));

    let out = lfd(&["apply", "-l", "1", "--x", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("missing field `a`"));

    let out = lfd(&["classify", "-a", "1", "-l", "1", "--x", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("`space`"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"a": "1", "l": true, "x": [1]}"#).unwrap();
    let out = lfd(&["apply", "-p", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("`l`"));
}

#[test]
fn invariant_violations_exit_2() {
    let zero_weight = lfd(&[
        "transform",
        "-a",
        "1",
        "-l",
        "1",
        "--v",
        "1,0,2",
        "--x",
        "1,2,3",
    ]);
    assert_eq!(zero_weight.status.code(), Some(2));
    let short = lfd(&["apply", "-a", "1", "-l", "1", "--x", "1,2", "-N", "5"]);
    assert_eq!(short.status.code(), Some(2));
    let short_v = lfd(&["norm", "-a", "1", "-l", "1", "--v", "1", "--x", "1,2"]);
    assert_eq!(short_v.status.code(), Some(2));
}

#[test]
fn float_overflow_exits_3() {
    let out = lfd(&[
        "coeffs", "-a", "-1e200", "-l", "1e200", "-n", "5", "--mode", "float",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = lfd(&[
        "apply", "-a", "-1e200", "-l", "1e200", "--x", "1,1,1", "--mode", "float",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn zero_candidate_is_in_every_dual() {
    let z = vec!["0"; 16].join(",");
    for space in ["l_inf", "c0", "c"] {
        let out = ok(&[
            "dual", "-a", "1/2", "-l", "1/4", "--z", &z, "--space", space,
        ]);
        let reports: Value = serde_json::from_str(&out).unwrap();
        for report in reports.as_array().unwrap() {
            assert_eq!(report["schema"], 1);
            assert_eq!(report["status"], "satisfied-at-truncation", "{report}");
            for condition in report["conditions"].as_array().unwrap() {
                assert_eq!(condition["status"], "satisfied-at-truncation");
            }
        }
    }
}

#[test]
fn gamma_dual_report_is_a4() {
    let z = (0..16)
        .map(|k| format!("1/{}", k + 1))
        .collect::<Vec<_>>()
        .join(",");
    let out = ok(&[
        "dual", "-a", "1", "-l", "1", "--z", &z, "--space", "c0", "--dual", "gamma",
    ]);
    let report: Value = serde_json::from_str(&out).unwrap();
    let conditions = report["conditions"].as_array().unwrap();
    assert_eq!(conditions.len(), 1);
    assert_eq!(conditions[0]["condition"], "A4");
    assert_eq!(report["status"], conditions[0]["status"]);
}

#[test]
fn classify_reports() {
    let x = (0..32).map(|k| k.to_string()).collect::<Vec<_>>().join(",");
    let out = ok(&[
        "classify", "-a", "1", "-l", "1", "--x", &x, "--space", "l_inf",
    ]);
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["status"], "violated-growth");
    assert_eq!(report["norm_estimate"], "31/1");
    assert_eq!(report["mode"], "exact");

    let zeros = ["0"; 8].join(",");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    fs::write(
        &path,
        format!(r#"{{"a": 0.5, "l": 0.25, "x": [{zeros}], "space": "c0", "mode": "float"}}"#),
    )
    .unwrap();
    let out = ok(&["classify", "-p", path.to_str().unwrap()]);
    let report: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(report["status"], "consistent-at-truncation");
    assert_eq!(report["mode"], "float");
    assert_eq!(report["norm_estimate"], 0.0);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "dual",
        "-a",
        "1/3",
        "-l",
        "1/2",
        "--z",
        "1,-1,1/2,3,0,2,-1/4,1",
        "--space",
        "c",
        "--seed",
        "5",
    ];
    assert_eq!(ok(&args), ok(&args));
    let verify = [
        "verify", "--seed", "7", "--trials", "4", "--length", "8", "--m-max", "8", "--json",
    ];
    assert_eq!(ok(&verify), ok(&verify));
}

#[test]
fn verify_suites() {
    let out = ok(&["verify", "--trials", "3", "--length", "8", "--m-max", "8"]);
    assert_eq!(out.lines().count(), 7);
    assert!(out.lines().all(|l| l.contains("PASS")), "{out}");

    let only = ok(&[
        "verify",
        "--suite",
        "convolution",
        "--m-max",
        "32",
        "--trials",
        "5",
    ]);
    assert_eq!(only, "convolution: PASS (5/5)\n");

    let bad = lfd(&["verify", "--suite", "nope"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn float_mode_outputs_numbers() {
    let out = ok(&[
        "apply", "-a", "1", "-l", "1", "--x", "3,5,9", "--mode", "float", "--json",
    ]);
    let json: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["sequence"], serde_json::json!([3.0, 2.0, 4.0]));
    assert_eq!(json["mode"], "float");
}

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_galois-sums"))
        .args(args)
        .env("GALOIS_SUMS_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = run(&all);
    let v = serde_json::from_str(&stdout(&o)).expect("valid JSON");
    (o.status.code().unwrap(), v)
}

#[test]
fn ring_report() {
    let o = run(&["ring", "-p", "3", "-n", "2", "-s", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("T = {0,1,8}"));
    let o = run(&["ring", "-p", "2", "-n", "2", "-s", "2"]);
    assert!(stdout(&o).contains("|R*| = 12"));
    let (code, v) = json(&["ring", "-p", "2", "-n", "2", "-s", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["units"], 12);
    assert_eq!(v["ring"]["modulus"], serde_json::json!([1, 1, 1]));
}

#[test]
fn composite_p_is_bad_input() {
    let o = run(&["ring", "-p", "4", "-n", "2", "-s", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p must be prime"));
}

#[test]
fn jacobi_values() {
    let (code, v) = json(&["jacobi", "-p", "3", "-n", "2", "--chi", "0,0", "--chi", "0,0", "-a", "1"]);
    assert_eq!(code, 0);
    assert!((v["value"][0].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert_eq!(v["lemma"], "all-trivial");
    assert_eq!(v["agree"], true);

    let (code, v) = json(&["jacobi", "-p", "3", "-n", "2", "--chi", "1,1", "--chi", "1,1", "--chi", "0,2"]);
    assert_eq!(code, 0);
    let (re, im) = (v["value"][0].as_f64().unwrap(), v["value"][1].as_f64().unwrap());
    assert!((re.hypot(im) - 9.0).abs() < 1e-9);
    assert_eq!(v["lemma"], "primitive-tuple");
    assert_eq!(v["expected"]["kind"], "power_of_q");
}

#[test]
fn tilde_and_gauss() {
    let (code, v) = json(&["tilde-jacobi", "-p", "3", "-n", "2", "--chi", "0,0", "--chi", "0,0", "-k", "1", "-a", "1"]);
    assert_eq!(code, 0);
    assert!((v["value"][0].as_f64().unwrap() - 6.0).abs() < 1e-9);
    let (code, v) = json(&["gauss", "-p", "3", "-n", "2", "--chi", "1,1", "--b", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["agree"], true);
}

#[test]
fn exit_codes() {
    let o = run(&["--inject-disagreement", "jacobi", "-p", "3", "-n", "2", "--chi", "0,0", "--chi", "0,0"]);
    assert_eq!(o.status.code(), Some(4));
    let o = run(&["--cap-terms", "5", "jacobi", "-p", "3", "-n", "2", "--chi", "0,0", "--chi", "0,0"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["table2", "--q", "12"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "no-such-suite"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--inject-disagreement", "verify", "counting"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn table2_rows() {
    let o = run(&["table2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 9);
    assert!(text.contains("146410"));
    assert!(text.contains("1.01181084127"));
    let (_, v) = json(&["table2", "--q", "7"]);
    assert_eq!(v.as_array().unwrap().len(), 9);
    assert_eq!(v[3]["N"], 410305012);
}

#[test]
fn codebook_report_and_export() {
    let dir = std::env::temp_dir().join(format!("galois-sums-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c.csv");
    let (code, v) = json(&["codebook", "-p", "3", "-n", "2", "-s", "1", "-m", "3", "-k", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!((v["N"].as_u64(), v["K"].as_u64()), (Some(162), Some(54)));
    assert!((v["imax_measured"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    assert!((v["imax_formula"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 162);
    assert!(csv.lines().last().unwrap().ends_with(",1,0"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_suite() {
    let o = run(&["verify", "gauss-laws"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 failures"));
}

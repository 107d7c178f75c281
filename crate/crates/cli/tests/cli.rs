use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rnaenum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn count_table() {
    let out = run(&["count", "--family", "general", "--theta", "1", "--p", "1", "--n-max", "7"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "n,count\n1,1\n2,1\n3,2\n4,4\n5,8\n6,17\n7,37\n");
}

#[test]
fn count_json_uses_decimal_strings() {
    let out = run(&["count", "--n", "120", "--output", "json"]);
    let v = json(&out);
    let c = v["counts"][0]["count"].as_str().unwrap();
    assert!(c.len() > 40 && c.chars().all(|ch| ch.is_ascii_digit()));
}

#[test]
fn rational_and_decimal_stickiness_agree() {
    let a = run(&["count", "--p", "3/8", "--n-max", "12"]);
    let b = run(&["count", "--p", "0.375", "--n-max", "12"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn links_table_sums_to_total() {
    let out = run(&["count", "--n", "7", "--by-links"]);
    let total: u64 = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 37);
}

#[test]
fn saturated_asymptotics() {
    let out = run(&["asym", "--family", "saturated", "--theta", "1", "--p", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["gamma"].as_f64().unwrap() - 2.35467).abs() < 1e-4);
    assert!((v["c_or_d"].as_f64().unwrap() - 1.07427).abs() < 1e-3);
    for key in ["class", "theta", "tau", "p", "q", "t0", "y0", "residual", "diagnostics"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn consistency_check() {
    let out = run(&["check", "--n-max", "12"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("all classes consistent"));
}

#[test]
fn melt_csv_shape() {
    let out = run(&["melt", "--n", "20", "--from", "-10", "--to", "10", "--step", "5"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "T_celsius,expected_pairs_nussinov,expected_pairs_stacking,expected_total_pairs_stacking"
    );
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("-10.00,"));
}

#[test]
fn structure_classification() {
    let out = run(&["structure", "((.))"]);
    let v = json(&out);
    assert_eq!(v["valid"], true);
    assert_eq!(v["stacked_pairs"], 1);
    assert_eq!(v["classification"]["is_g_saturated"], true);
    let out = run(&["structure", r#"{"n": 5, "pairs": [[1, 5]]}"#, "--theta", "3"]);
    assert_eq!(json(&out)["valid"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["count", "--q", "1"]).status.code(), Some(1));
    assert_eq!(run(&["count", "--p", "abc"]).status.code(), Some(1));
    assert_eq!(run(&["count", "--family", "saturated", "--tau", "1"]).status.code(), Some(1));
    assert_eq!(run(&["structure", "(()"]).status.code(), Some(1));
    // a_0 = 0, so the ratio diagnostic at n = 1 cannot be formed
    assert_eq!(run(&["asym", "--diagnostic-n", "1"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["limitlaw", "--family", "g-saturated"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn precision_digits_rounds_and_bounds() {
    let out = run(&["limitlaw", "--family", "saturated", "--precision-digits", "4"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["mu"].as_f64().unwrap(), 0.3374);
    let out = run(&["limitlaw", "--family", "saturated", "--precision-digits", "40"]);
    assert_eq!(out.status.code(), Some(1));
}

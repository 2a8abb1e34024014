use std::path::Path;

use ringtax::{main_with_args, EXIT_OK, EXIT_OUTPUT, EXIT_USAGE};

const SMALL: [&str; 4] = ["--q-grid", "60:90:10", "--p-grid", "100:112:1"];

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut full = vec!["ringtax"];
    full.extend_from_slice(args);
    let code = main_with_args(full, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn with_small(args: &[&str]) -> Vec<String> {
    args.iter().chain(SMALL.iter()).map(|s| s.to_string()).collect()
}

fn run_small(args: &[&str]) -> (i32, String) {
    let v = with_small(args);
    run(&v.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn run_emits_json_to_stdout() {
    let (code, out) = run_small(&["run"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "ok");
    assert_eq!(v["tax"]["kind"], "none");
    assert_eq!(v["equilibrium"]["quantities"], serde_json::json!([70.0, 70.0]));
    assert_eq!(v["equilibrium"]["equilibrium_kind"], "pure");
}

#[test]
fn zero_lambda_reports_match_untaxed() {
    let eq = |args: &[&str]| {
        let (code, out) = run_small(args);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        v["equilibrium"].clone()
    };
    let none = eq(&["run", "--tax", "none"]);
    assert_eq!(eq(&["run", "--tax", "cardinal", "--lambda", "0"]), none);
    assert_eq!(eq(&["run", "--tax", "ordinal", "--lambda", "0"]), none);
}

#[test]
fn csv_follows_output_extension() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let (code, out) = run_small(&["run", "--costs", "99,100", "--output", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("label,tax_kind,c1,c2,q1,q2"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("none/99-100,none,99.000000,100.000000,"), "{row}");
    assert!(lines.next().is_none());
}

#[test]
fn config_file_is_read_and_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"tax": {"kind": "ordinal", "lambda": 0.1},
            "grids": {"q_min": 60, "q_max": 90, "q_step": 10, "p_min": 100, "p_max": 112, "p_step": 1}}"#,
    )
    .unwrap();
    let (code, out) = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["tax"]["kind"], "ordinal");
    let (_, out) = run(&["run", "--config", cfg.to_str().unwrap(), "--tax", "cardinal", "--gamma", "2"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["tax"]["kind"], "cardinal");
    assert_eq!(v["tax"]["gamma"], 2.0);
}

#[test]
fn usage_and_config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"tax": {"lambda": -1}}"#).unwrap();
    assert_eq!(run(&["run", "--config", bad.to_str().unwrap()]).0, EXIT_USAGE);
    std::fs::write(&bad, r#"{"firms": [{"position": 0.0, "colour": 1}]}"#).unwrap();
    assert_eq!(run(&["run", "--config", bad.to_str().unwrap()]).0, EXIT_USAGE);
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["run", "--config", missing.to_str().unwrap()]).0, EXIT_USAGE);
    assert_eq!(run(&["explode"]).0, EXIT_USAGE);
    assert_eq!(run(&["run", "--threads", "0"]).0, EXIT_USAGE);
    assert_eq!(run(&["run", "--q-grid", "1:2"]).0, EXIT_USAGE);
    assert_eq!(run(&["run", "--tax", "flat"]).0, EXIT_USAGE);
    assert_eq!(run(&["run", "--format", "json", "--output", "x.csv"]).0, EXIT_USAGE);
    assert_eq!(run(&["run", "--costs", "1,2,3"]).0, EXIT_USAGE);
}

#[test]
fn unwritable_output_has_its_own_code() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("no/such/dir/out.json");
    assert!(!Path::new(&target).parent().unwrap().exists());
    assert_eq!(run_small(&["run", "--output", target.to_str().unwrap()]).0, EXIT_OUTPUT);
}

#[test]
fn suite_reports_nine_rows_with_unit_baseline() {
    let (code, out) = run_small(&["suite", "--format", "csv", "--threads", "2"]);
    assert_eq!(code, EXIT_OK);
    let mut r = csv::Reader::from_reader(out.as_bytes());
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 9);
    assert_eq!(&rows[0][0], "none/100-100");
    assert_eq!(&rows[0][12], "1.000000");
    for row in &rows {
        for field in row.iter().skip(2).take(10) {
            assert!(!field.contains("NaN") && !field.contains("inf"), "{row:?}");
        }
    }

    let (code, json) = run_small(&["suite", "--threads", "1"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["baseline"], "none/100-100");
    assert_eq!(v["rows"].as_array().unwrap().len(), 9);
    assert_eq!(v["rows"][0]["revenue_normalized"], 1.0);
}

#[test]
fn validate_reports_every_check() {
    let (code, out) = run_small(&["validate", "--format", "csv"]);
    let mut r = csv::Reader::from_reader(out.as_bytes());
    let names: Vec<String> = r.records().map(|x| x.unwrap()[0].to_string()).collect();
    assert_eq!(
        names,
        ["cournot", "matching_pennies", "prisoners_dilemma", "battle_of_the_sexes", "random_4x4_games"]
    );
    // the coarse test grid keeps the capacity pick within one step of 80
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

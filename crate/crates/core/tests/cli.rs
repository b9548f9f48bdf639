//! End-to-end checks of the `cauchy-gof` binary: exit codes, file round
//! trips, output formats and reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cauchy-gof"));
    c.env("GOF_THREADS", "2");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn schema() -> jsonschema::Validator {
    let text = fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/test-report.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).expect("schema compiles")
}

fn assert_valid(report: &Value) {
    let v = schema();
    let errors: Vec<String> = v.iter_errors(report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{report:#}");
}

#[test]
fn sample_then_test_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("x.txt");
    let out = run(&["sample", "--dist", "cauchy:2,3", "--n", "40", "--seed", "8", "-o", path_str(&data)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&data).unwrap();
    assert_eq!(text.lines().count(), 40);

    let expected = cauchy_gof::sample(&"cauchy:2,3".parse().unwrap(), 40, 8).unwrap();
    let parsed: Vec<f64> = text.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(parsed, expected.values());

    let out = run(&["test", path_str(&data), "--calibration-reps", "300", "--seed", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_valid(&report);
    assert_eq!(report["n"], 40);
    let stat = report["statistic"].as_f64().unwrap();
    let direct = cauchy_gof::compute_statistic(&expected, &cauchy_gof::TestConfig::default()).unwrap();
    assert_eq!(stat, direct.delta);
    let reject = report["reject"].as_bool().unwrap();
    assert_eq!(reject, stat > report["critical_value"].as_f64().unwrap());
}

#[test]
fn reports_validate_in_every_mode() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("x.txt");
    fs::write(&data, "# normal draws\n0.1\n-1.2\n0.7\n\n2.2\n-0.4\n0.05\n1.1\n-0.9\n").unwrap();
    for extra in [
        vec!["--pvalue-reps", "199"],
        vec!["--pvalue-reps", "199", "--baselines"],
        vec!["--baselines", "--exponent", "0.5", "--method", "quadrature"],
        vec!["--fit-mode", "scale-only", "--a", "2", "--gamma", "1", "--method", "vstat"],
    ] {
        let mut args = vec!["test", path_str(&data), "--calibration-reps", "200"];
        args.extend(&extra);
        let out = run(&args);
        assert_eq!(code(&out), 0, "{extra:?}: {}", String::from_utf8_lossy(&out.stderr));
        let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_valid(&report);
        if extra.contains(&"--pvalue-reps") {
            let p = report["p_value"].as_f64().unwrap();
            assert_eq!(report["reject"].as_bool().unwrap(), p < 0.05);
        }
    }
}

#[test]
fn schema_rejects_malformed_reports() {
    let v = schema();
    assert!(!v.is_valid(&serde_json::json!({ "statistic": 1.0 })));
    assert!(!v.is_valid(&serde_json::json!([])));
}

#[test]
fn csv_input_with_column() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("x.csv");
    let rows: String = cauchy_gof::sample(&cauchy_gof::AlternativeSpec::STANDARD_CAUCHY, 25, 2)
        .unwrap()
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{i},{v:?},\"tag, {i}\"\n"))
        .collect();
    fs::write(&data, format!("id,value,tag\n{rows}")).unwrap();
    for col in ["value", "1"] {
        let out = run(&["test", path_str(&data), "--column", col, "--calibration-reps", "200", "--format", "csv"]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let text = stdout(&out);
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("statistic,n,"));
        assert!(lines.next().unwrap().split(',').nth(1) == Some("25"));
    }
    let out = run(&["test", path_str(&data), "--column", "nope"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    };

    let two = write("two.txt", "1.0\n2.5\n");
    let out = run(&["test", path_str(&two)]);
    assert_eq!(code(&out), 3);
    assert!(out.stdout.is_empty());

    let tied = write("tied.txt", "4\n4\n4\n4\n1\n");
    assert_eq!(code(&run(&["test", path_str(&tied)])), 3);

    let empty = write("empty.txt", "# nothing here\n\n");
    assert_eq!(code(&run(&["test", path_str(&empty)])), 2);

    let junk = write("junk.txt", "1\n2\nthree\n");
    let out = run(&["test", path_str(&junk)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    assert_eq!(code(&run(&["test", path_str(&dir.path().join("missing.txt"))])), 2);
    assert_eq!(code(&run(&["sample", "--n", "10"])), 2);
    assert_eq!(code(&run(&["sample", "--dist", "t:-1"])), 2);
    assert_eq!(code(&run(&["sample", "--dist", "gamma:2"])), 2);
    assert_eq!(code(&run(&["test", path_str(&junk), "--level", "2"])), 2);
    assert_eq!(code(&run(&[])), 2);
}

#[test]
fn tukey_zero_file_equals_normal_file() {
    let a = stdout(&run(&["sample", "--dist", "tukey:0", "--n", "10", "--seed", "1"]));
    let b = stdout(&run(&["sample", "--dist", "normal", "--n", "10", "--seed", "1"]));
    assert_eq!(a.lines().count(), 10);
    assert_eq!(a, b);
}

#[test]
fn calibrate_is_byte_reproducible() {
    let args = ["calibrate", "--n", "10,20", "--reps", "300", "--levels", "0.10,0.05", "--seed", "9"];
    let first = run(&args);
    assert_eq!(code(&first), 0);
    let again = bin().args(args).env("GOF_THREADS", "1").output().unwrap();
    assert_eq!(first.stdout, again.stdout);
    let text = stdout(&first);
    assert!(text.starts_with("| Sig. \\ n | 10 | 20 |"));
    assert!(text.contains("- seed: 9"));
    assert!(text.contains("- engine_version:"));

    let single = stdout(&run(&["calibrate", "--n", "10", "--reps", "200", "--levels", "0.10", "--format", "json"]));
    let tables: Value = serde_json::from_str(&single).unwrap();
    assert_eq!(tables[0]["rows"].as_array().unwrap().len(), 1);
    assert_eq!(tables[0]["seed"], 1);
    assert!(tables[0]["metadata"]["generator"].as_str().unwrap().contains("ChaCha8"));
}

#[test]
fn power_table_layout() {
    let out = run(&[
        "power", "--n", "20", "--alts", "normal,cauchy:1,2", "--a", "2,6", "--gamma", "2.5",
        "--reps", "150", "--calibration-reps", "300", "--baselines",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "| alternative | gamma=2.5 a=2 | gamma=2.5 a=6 | KS | CvM | AD | Watson |");
    assert!(lines[2].starts_with("| N(0,1) |"));
    assert!(lines[3].starts_with("| C(1,2) |"));

    let json = stdout(&run(&["power", "--n", "20", "--alts", "uniform", "--reps", "150", "--calibration-reps", "300", "--format", "json"]));
    let tables: Value = serde_json::from_str(&json).unwrap();
    let rate = tables[0]["rows"][0]["rejection_rate"].as_f64().unwrap();
    assert!(rate > 0.8, "{rate}");
    assert_eq!(code(&run(&["power", "--alts", "weibull"])), 2);
}

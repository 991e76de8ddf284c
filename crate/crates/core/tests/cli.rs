use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn fatpoint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fatpoint"))
        .args(args)
        .env_remove("FATPOINT_PRECISION")
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Compares against `tests/golden/<name>`; `FATPOINT_BLESS=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("FATPOINT_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert_eq!(actual, expected, "golden {name} differs");
}

#[test]
fn reduce_two_level_example() {
    let o = fatpoint(&["reduce", "--mod", "3", "two_level.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    golden("reduce_two_level.json", &stdout(&o));
    assert_eq!(stderr(&o), "reduce: {-1-t, 2-t} after 1 step(s)\n");
}

#[test]
fn ghost0_is_rejected() {
    let o = fatpoint(&["validate", "ghost0.json"]);
    assert_eq!(o.status.code(), Some(2));
    golden("validate_ghost0.json", &stdout(&o));
    assert_eq!(stderr(&o), "error: constant term of P2 is not a unit\n");
}

#[test]
fn parse_errors_are_located() {
    let o = fatpoint(&["validate", "bad_poly.json"]);
    assert_eq!(o.status.code(), Some(2));
    golden("validate_bad_poly.json", &stdout(&o));

    let o = fatpoint(&["validate", "unknown_field.json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["error"]["kind"], "Parse");
    assert!(v["error"]["message"].as_str().unwrap().contains("unknown field `colour`"));

    let o = fatpoint(&["validate", "does_not_exist.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn precision_request_beyond_the_document() {
    let o = fatpoint(&["reduce", "--mod", "7", "quadratic_p6.json"]);
    assert_eq!(o.status.code(), Some(3));
    golden("reduce_precision_request.json", &stdout(&o));
}

#[test]
fn trace_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.json");
    let o = fatpoint(&["reduce", "--mod", "3", "quadratic_f101.json", "--emit-trace", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let o = fatpoint(&["replay", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stderr(&o), "all certificates verified\n");

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    doc["certificates"][0]["lift"] = Value::String("1+t+t^3".into());
    std::fs::write(&trace, serde_json::to_string(&doc).unwrap()).unwrap();
    let o = fatpoint(&["replay", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verified"], false);
}

#[test]
fn symbol_only_and_regulator_agree() {
    let a = fatpoint(&["reduce", "--mod", "3", "--symbol-only", "quadratic_f101.json"]);
    let b = fatpoint(&["regulator", "--mod", "3", "quadratic_f101.json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    golden("regulator_quadratic_f101.json", &stdout(&a));
}

#[test]
fn batches_keep_input_order() {
    let files = ["two_level.json", "ghost0.json", "quadratic_f101.json", "two_level.json"];
    let mut args = vec!["validate", "--jobs", "3"];
    args.extend(files);
    let par = fatpoint(&args);
    let seq_reports: Vec<Value> = files
        .iter()
        .map(|f| serde_json::from_str(&stdout(&fatpoint(&["validate", f]))).unwrap())
        .collect();
    let par_reports: Value = serde_json::from_str(&stdout(&par)).unwrap();
    assert_eq!(par_reports, Value::Array(seq_reports));
    assert_eq!(par.status.code(), Some(2));
}

#[test]
fn stdin_input() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_fatpoint"))
        .args(["norm", "-", "--element", "y1+3"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(std::fs::read(data("two_level.json")).unwrap().as_slice())
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["norm"], "8-t");
    assert_eq!(v["rank"], 2);
}

#[test]
fn precision_environment_override() {
    let o = Command::new(env!("CARGO_BIN_EXE_fatpoint"))
        .args(["validate", "--mod", "2"])
        .arg(data("two_level.json"))
        .env("FATPOINT_PRECISION", "5")
        .output()
        .unwrap();
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["precision"], 5);
    let o = fatpoint(&["validate", "--mod", "2", "two_level.json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["precision"], 8);
}

#[test]
fn arithmetic_commands() {
    let o = fatpoint(&["graph", "--mod", "3", "--", "-1-t", "2-t"]);
    assert_eq!(o.status.code(), Some(0));
    golden("graph.json", &stdout(&o));

    let o = fatpoint(&["graph", "--mod", "3", "1", "2"]);
    assert_eq!(o.status.code(), Some(3));

    let o = fatpoint(&["witt", "coords", "--mod", "3", "1+t+t^2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["coordinates"], serde_json::json!(["-1", "-1", "1"]));

    let o = fatpoint(&["witt", "add", "--field", "F101", "--mod", "2", "1+100*t", "1+t"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["result"], "1+100*t^2");

    let o = fatpoint(&["witt", "ghost", "--mod", "2", "2+t"]);
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["error"]["kind"], "NotRelative");

    let o = fatpoint(&["witness", "steinberg", "--", "-2"]);
    assert_eq!(o.status.code(), Some(0));
    golden("witness_steinberg.json", &stdout(&o));
}

#[test]
fn equivalence_mod_t_power() {
    let dir = tempfile::tempdir().unwrap();
    let other = dir.path().join("perturbed.json");
    std::fs::write(&other, r#"{"field":"Q","n":2,"polys":["y1^2-(1+t+t^3)","y2-y1-3"]}"#).unwrap();
    let o = fatpoint(&["equiv", "two_level.json", other.to_str().unwrap(), "--mod", "3"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["equivalent"], true);
    let o = fatpoint(&["equiv", "two_level.json", other.to_str().unwrap(), "--mod", "4"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["equivalent"], false);
}

#[test]
fn usage_errors() {
    let o = fatpoint(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    let o = fatpoint(&["reduce", "two_level.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fatpoint(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("regulator"));
}

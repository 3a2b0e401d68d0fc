use std::path::Path;
use std::process::{Command, Output};

use liftbell::bell::format::{functional_from_json, functional_to_json};
use liftbell::catalog::lo_chsh;
use liftbell::qmodel::{model_to_json, reference_lo_chsh_model};

fn liftbell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liftbell"))
        .args(args)
        .env_remove("LIFTBELL_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn number(o: &Output) -> f64 {
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(o).trim().parse().unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn bound_values() {
    assert_eq!(stdout(&liftbell(&["bound", "--class", "local", "--functional", "lo-chsh"])).trim(), "2");
    assert_eq!(stdout(&liftbell(&["bound", "--class", "ns", "--functional", "chsh"])).trim(), "4");
    let q = number(&liftbell(&["bound", "--class", "quantum", "--functional", "chsh"]));
    assert!((q - 2.0 * 2f64.sqrt()).abs() < 1e-6, "{q}");
}

#[test]
fn input_errors_exit_with_two() {
    for args in [
        vec!["bound", "--class", "local", "--functional", "no-such-inequality"],
        vec!["bound", "--class", "quantum", "--functional", "chsh", "--tol", "5"],
        vec!["lift", "--functional", "chsh", "--step", "{\"op\": \"teleport\"}"],
        vec!["bound", "--class", "sideways", "--functional", "chsh"],
    ] {
        assert_eq!(liftbell(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn infeasible_curve_points_exit_with_three() {
    let o = liftbell(&["selftest-curve", "--from", "2.9", "--to", "3.0", "--points", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[2] == "failed"));
}

#[test]
fn empty_lifts_reserialize_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    let steps = dir.path().join("steps.json");
    std::fs::write(&steps, "[]").unwrap();
    let run = |input: &str, out: &Path| {
        let o = liftbell(&["lift", "--functional", input, "--steps", steps.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    };
    run("lo-chsh", &first);
    run(first.to_str().unwrap(), &second);
    let (a, b) = (std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap(), functional_to_json(&lo_chsh()));
}

#[test]
fn lifts_are_verified_and_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lifted.json");
    let o = liftbell(&[
        "lift",
        "--functional",
        "chsh",
        "--step",
        r#"{"op": "outcome", "party": 1, "input": 0, "outcome": 1}"#,
        "--step",
        r#"{"op": "outcome", "party": 1, "input": 1, "outcome": 1}"#,
        "--verify-local-bound",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let lifted = functional_from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(lifted.scenario().outcome_table(), &[vec![2, 2], vec![3, 3]][..]);
    let local = liftbell(&["bound", "--class", "local", "--functional", out.to_str().unwrap()]);
    assert_eq!(stdout(&local).trim(), "2");
}

#[test]
fn selftest_curve_reaches_one_near_the_maximum() {
    let o = liftbell(&["selftest-curve", "--points", "3", "--from", "2.7", "--to", "2.8284"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("# liftbell"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 3);
    let bounds: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(bounds[2] >= 0.99, "{bounds:?}");
    assert!(bounds[0] < bounds[2]);
}

#[test]
fn slice_rows_cover_every_set() {
    let o = liftbell(&["slice", "--points", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 9);
    let max_of = |set: &str| -> f64 { rows.iter().find(|r| r[0] == set).unwrap()[3].parse().unwrap() };
    assert_eq!(max_of("L"), 2.0);
    assert_eq!(max_of("N"), 4.0);
    assert!((max_of("Q") - 2.0 * 2f64.sqrt()).abs() < 1e-5);
}

#[test]
fn eval_model_on_the_reference_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    std::fs::write(&path, model_to_json(&reference_lo_chsh_model())).unwrap();
    let v = number(&liftbell(&["eval-model", "--model", path.to_str().unwrap(), "--functional", "lo-chsh"]));
    assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-11, "{v}");
}

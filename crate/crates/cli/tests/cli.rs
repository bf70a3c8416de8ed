use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rasch-doe"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_stdout(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn text_stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn symmetric_two_rule_threshold() {
    // with two rules and equal singleton intensities the corner design stops
    // being optimal at sqrt(2) - 1
    let below = json_stdout(&["inequalities", "--k", "2", "--lambda", "0.41"]);
    let above = json_stdout(&["inequalities", "--k", "2", "--lambda", "0.42"]);
    assert_eq!(below["verdict"], "optimal");
    assert_eq!(above["verdict"], "not-optimal");
    assert_eq!(above["violated_sizes"], serde_json::json!([2]));
}

#[test]
fn inequality_value_matches_closed_form() {
    // k = 2, d = 1: the corner design has weight 1/3 on 00, 10, 01 and the
    // sensitivity at 11 is 3 (μ1 μ2 + μ1 + μ2), so the bound d <= 3 reduces
    // to μ1 + μ2 + μ1 μ2 <= 1
    let out = json_stdout(&["inequalities", "--k", "2", "--beta", r#"{"1": -2, "2": -2}"#, "--terms"]);
    let lhs = out["inequalities"][0]["lhs"].as_f64().unwrap();
    let mu = (-2.0f64).exp();
    let direct = 2.0 * mu + mu * mu;
    assert!((lhs - direct).abs() < 1e-9, "{lhs} vs {direct}");
    assert!(out["inequalities"][0]["terms"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn optimize_saturated_weights() {
    let out = json_stdout(&["optimize", "--k", "2", "--lambda", "0.3"]);
    let w = out["design"]["weights"].as_object().unwrap();
    assert_eq!(w.len(), 3);
    for key in ["00", "10", "01"] {
        assert!((w[key].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    }
    assert_eq!(out["report"]["structure"], "corner");
    assert_eq!(out["report"]["converged"], true);
}

#[test]
fn optimize_to_directory_and_certify() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let o = run(&["optimize", "--k", "3", "--lambda", "0.8", "--out", out_dir.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "optimize");
    assert_eq!(manifest["outputs"], serde_json::json!(["design.json", "report.json"]));
    let design = out_dir.join("design.json");
    let cert = json_stdout(&["certify", "--k", "3", "--lambda", "0.8", "--design", design.to_str().unwrap()]);
    assert_eq!(cert["optimal"], true);
    // the maximum of the sensitivity equals p = 4 at an optimum
    assert!((cert["max_value"].as_f64().unwrap() - 4.0).abs() < 1e-5);
}

#[test]
fn certify_rejects_corner_at_unit_intensity() {
    let dir = tempfile::tempdir().unwrap();
    let design = write(
        dir.path(),
        "w.json",
        r#"{"k": 2, "weights": {"00": 0.3333333333333333, "10": 0.3333333333333334, "01": 0.3333333333333333}}"#,
    );
    let cert = json_stdout(&["certify", "--k", "2", "--design", &design]);
    assert_eq!(cert["optimal"], false);
    assert_eq!(cert["worst"], "11");
}

#[test]
fn parameter_file_round_trip_through_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    let params = write(dir.path(), "p.json", r#"{"k": 3, "d": 1, "beta": {"": 0.0, "1": -1.0, "2": 0.5, "3": 0.25}}"#);
    let out = json_stdout(&["symmetry", "--params", &params, "--g", "perm=1,2,3"]);
    let beta = &out["orbit"][0]["beta"];
    assert_eq!(beta["1"].as_f64(), Some(-1.0));
    assert_eq!(beta["2"].as_f64(), Some(0.5));
    // a permutation relabels the coefficients
    let out = json_stdout(&["symmetry", "--params", &params, "--g", "perm=2,3,1"]);
    let beta = &out["orbit"][0]["beta"];
    let mut moved: Vec<f64> = ["1", "2", "3"].iter().map(|k| beta[k].as_f64().unwrap()).collect();
    moved.sort_by(f64::total_cmp);
    assert_eq!(moved, vec![-1.0, 0.25, 0.5]);
    assert_eq!(out["elements"][0]["det_q"].as_i64().map(i64::abs), Some(1));
}

#[test]
fn center_path_unit_intensity_is_uniform() {
    let csv = text_stdout(&["center-path", "--lambdas", "1,0.9"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "param,coord_1,coord_2,coord_3,log_det,status,inside,first_exit");
    assert_eq!(lines.len(), 3);
    let first: Vec<&str> = lines[1].split(',').collect();
    for c in &first[1..4] {
        assert!((c.parse::<f64>().unwrap() - 0.25).abs() < 1e-9);
    }
    assert_eq!(first[5], "converged");
    assert_eq!(first[6], "true");
}

#[test]
fn center_path_cold_matches_warm() {
    let warm = text_stdout(&["center-path", "--from", "1", "--to", "0.5", "--step", "0.1"]);
    let cold = text_stdout(&["center-path", "--from", "1", "--to", "0.5", "--step", "0.1", "--cold", "--threads", "3"]);
    assert_eq!(warm.lines().count(), 7);
    for (a, b) in warm.lines().zip(cold.lines()).skip(1) {
        let a: Vec<f64> = a.split(',').take(5).map(|v| v.parse().unwrap()).collect();
        let b: Vec<f64> = b.split(',').take(5).map(|v| v.parse().unwrap()).collect();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-7, "{a:?} vs {b:?}");
        }
    }
}

#[test]
fn region_slice_is_thread_independent() {
    let args = ["region-slice", "--k", "5", "--points", "12", "--s-max", "0.8", "--t-max", "1.5"];
    let one = text_stdout(&args);
    let many = text_stdout(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one, many);
    assert_eq!(one.lines().count(), 1 + 144);
    assert_eq!(one.lines().next().unwrap(), "s,t,lhs_3,lhs_4,lhs_5,binding_c,verdict");
}

#[test]
fn region_slice_explicit_values() {
    let csv = text_stdout(&["region-slice", "--k", "3", "--s-values", "0.5", "--t-values", "0.5"]);
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    // |C| = 3 on the slice: s^3 t^3 + 3 s^2 t^3 + 3 s^3 t^2 at s = t = 1/2
    let expected = 0.5f64.powi(6) + 6.0 * 0.5f64.powi(5);
    assert!((row[2].parse::<f64>().unwrap() - expected).abs() < 1e-12);
    assert_eq!(row[4], "optimal");
}

#[test]
fn probe_is_reproducible() {
    let args = ["probe", "--k", "5", "--samples", "2000", "--seed", "7"];
    let a = json_stdout(&args);
    let b = json_stdout(&args);
    assert_eq!(a, b);
    assert_eq!(a.as_object().unwrap().keys().collect::<Vec<_>>(), vec!["3", "4", "5"]);
}

#[test]
fn compare_grid_agrees_at_first_order() {
    let out = json_stdout(&["compare", "--k", "3", "--samples", "300", "--seed", "1", "--threads", "2"]);
    assert_eq!(out["agreements"], 300);
    assert!(out["disagreements"].as_array().unwrap().is_empty());
    let single = json_stdout(&["compare", "--k", "3", "--lambda", "0.2"]);
    assert_eq!(single["agree"], true);
    assert_eq!(single["theorem"]["optimal"], true);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["bogus"]), Some(2));
    assert_eq!(code(&["inequalities"]), Some(2));
    assert_eq!(code(&["inequalities", "--k", "2", "--lambda", "0.3", "--beta", "{}"]), Some(2));
    assert_eq!(code(&["region-slice", "--k", "4", "--points", "0"]), Some(2));
    assert_eq!(code(&["region-slice", "--k", "4", "--d", "1"]), Some(2));
    assert_eq!(code(&["center-path", "--k", "2"]), Some(2));
    assert_eq!(code(&["probe", "--k", "4", "--threads", "0"]), Some(2));
    assert_eq!(code(&["certify", "--k", "2", "--design", "/nonexistent/w.json"]), Some(1));
    // a handful of iterations cannot reach the equivalence bound
    let o = run(&["optimize", "--k", "3", "--lambda", "0.7", "--max-iterations", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).lines().last().unwrap().starts_with("error:"));
    // the partial result is still printed
    assert!(serde_json::from_slice::<Value>(&o.stdout).is_ok());
}

#[test]
fn mismatched_parameter_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let params = write(dir.path(), "p.json", r#"{"k": 2, "d": 1, "beta": {"12": 1.0}}"#);
    assert_eq!(run(&["inequalities", "--params", &params]).status.code(), Some(2));
    let params = write(dir.path(), "q.json", r#"{"k": 2, "d": 1, "beta": {"1": 1.0}}"#);
    assert_eq!(run(&["inequalities", "--params", &params, "--k", "3"]).status.code(), Some(2));
}

#[test]
fn manifest_goes_to_stderr_without_out() {
    let o = run(&["probe", "--k", "4", "--samples", "50", "--seed", "3"]);
    assert!(o.status.success());
    let manifest: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(manifest["command"], "probe");
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["args"][0], "probe");
}

#[test]
fn optimize_uniform_at_zero() {
    let out = json_stdout(&["optimize", "--k", "3"]);
    let w = out["design"]["weights"].as_object().unwrap();
    assert_eq!(w.len(), 8);
    assert!(w.values().all(|v| (v.as_f64().unwrap() - 0.125).abs() < 1e-9));
    assert_eq!(out["report"]["structure"], "uniform");
}

#[test]
fn optimize_interior_design_meets_bound() {
    let out = json_stdout(&["optimize", "--k", "2", "--lambda", "0.8", "--kw-tolerance", "1e-10"]);
    assert_eq!(out["report"]["structure"], "interior");
    assert!((out["report"]["final_kw_max"].as_f64().unwrap() - 3.0).abs() < 1e-8);
    assert_eq!(out["design"]["weights"].as_object().unwrap().len(), 4);
}

#[test]
fn center_path_leaves_polytope_near_transition() {
    let csv = text_stdout(&["center-path", "--from", "0.45", "--to", "0.38", "--step", "0.001"]);
    let exit: Vec<f64> = csv
        .lines()
        .skip(1)
        .filter(|l| l.ends_with(",true"))
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(exit.len(), 1);
    assert!((exit[0] - (2f64.sqrt() - 1.0)).abs() <= 0.005, "{exit:?}");
}

#[test]
fn region_slice_binding_on_unit_square() {
    let csv = text_stdout(&["region-slice", "--k", "10", "--points", "40", "--threads", "2"]);
    for line in csv.lines().skip(1) {
        let binding = line.split(',').nth(10).unwrap();
        assert!(["3", "4", "5"].contains(&binding), "{line}");
    }
}

#[test]
fn probe_strip_finds_larger_binding_sets() {
    let out =
        json_stdout(&["probe", "--k", "10", "--t-min", "1", "--t-max", "1.3", "--samples", "20000", "--seed", "5"]);
    let any_beyond_five = (6..=10).any(|c| out[c.to_string()]["redundant_in_region"] == false);
    assert!(any_beyond_five, "{out}");
}

#[test]
fn compare_second_order_reports_both_systems() {
    let out = json_stdout(&["compare", "--k", "3", "--d", "2", "--samples", "200", "--seed", "2"]);
    assert_eq!(out["points"], 200);
    for row in out["disagreements"].as_array().unwrap() {
        assert!(row["theorem_lhs"].is_object() && row["saturated"].is_object());
    }
    let single = json_stdout(&["compare", "--k", "2", "--beta", r#"{"1": -2, "2": -2}"#]);
    assert_eq!(single["kw_sensitivities"].as_object().unwrap().len(), 4);
}

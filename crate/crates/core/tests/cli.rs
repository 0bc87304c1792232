//! Black-box tests of the smoothamb binary: artifact shapes and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_smoothamb")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary must spawn")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const TWO_POINT: &str = r#"{
  "ambiguity": {
    "gamma": -0.5,
    "sod": {
      "kind": "discrete",
      "points": [
        { "mu": 0.15, "prob": 0.6666666666666666 },
        { "mu": 0.09, "prob": 0.3333333333333333 }
      ]
    }
  }
}"#;

#[test]
fn zero_argument_solve_reproduces_the_headline_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["solve"]);
    assert_eq!(out.status.code(), Some(0));

    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("solve.json")).unwrap()).unwrap();
    let tw = &report["solution"]["terminal_wealth"];
    assert!((tw["w2"].as_f64().unwrap() - 0.0363).abs() < 5e-4);
    assert!((tw["w1"].as_f64().unwrap() - 0.3230).abs() < 5e-4);
    assert!((report["merton"]["pi0"].as_f64().unwrap() - 1.875).abs() < 1e-9);
    // keys are lower_snake_case throughout
    let text = std::fs::read_to_string(dir.path().join("solve.json")).unwrap();
    assert!(text.contains("\"sigma0_sq\""));
    assert!(text.contains("\"budget_residual\""));
}

#[test]
fn frontier_grid_of_two_writes_exactly_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "cfg.json",
        &TWO_POINT.replace("\"gamma\": -0.5,", "\"gamma\": -0.5, \"unused\": null,"),
    );
    // sanity: the injected unknown key must be rejected...
    let out = run_in(dir.path(), &["frontier", "--config", &config]);
    assert_eq!(out.status.code(), Some(1));

    // ...and the clean config accepted
    let grid = write_config(
        dir.path(),
        "cfg2.json",
        &TWO_POINT.replace("\"ambiguity\"", "\"frontier\": { \"grid_size\": 2 }, \"ambiguity\""),
    );
    let out = run_in(dir.path(), &["frontier", "--config", &grid]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(dir.path().join("frontier.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lambda1,lambda2,m1,m2,kappa");
    assert_eq!(lines.len(), 3, "header plus exactly two data rows");

    // every field round-trips through 17 significant digits or fewer
    for line in &lines[1..] {
        for field in line.split(',') {
            let value: f64 = field.parse().unwrap();
            assert_eq!(value.to_string(), *field);
        }
    }
}

#[test]
fn invalid_configs_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("bad_beta.json", r#"{"utility":{"family":"crra","beta":1.5}}"#),
        ("unknown.json", r#"{"marke":{"mu0":0.1}}"#),
        ("not_json.json", "{"),
        ("bad_prob.json", r#"{"ambiguity":{"gamma":-0.5,"sod":{"kind":"discrete","points":[{"mu":0.1,"prob":0.7},{"mu":0.2,"prob":0.7}]}}}"#),
    ];
    for (name, body) in cases {
        let config = write_config(dir.path(), name, body);
        let out = run_in(dir.path(), &["solve", "--config", &config]);
        assert_eq!(out.status.code(), Some(1), "{name} must fail validation");
        assert!(!out.stderr.is_empty(), "{name} must explain itself on stderr");
    }
}

#[test]
fn prior_kind_must_match_the_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "two_point.json", TWO_POINT);
    for experiment in ["solve", "compare", "sweep"] {
        let out = run_in(dir.path(), &[experiment, "--config", &config]);
        assert_eq!(out.status.code(), Some(1), "{experiment} needs a gaussian prior");
    }
    for experiment in ["frontier", "fixed-point"] {
        let out = run_in(dir.path(), &[experiment]);
        assert_eq!(out.status.code(), Some(1), "{experiment} needs a discrete prior");
    }
}

#[test]
fn numerical_failures_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    // precision 0.1 with strong ambiguity seeking pushes the curvature
    // coefficient past beta
    let config = write_config(
        dir.path(),
        "singular.json",
        r#"{
  "ambiguity": { "gamma": 0.9, "sod": { "kind": "gaussian", "sigma_mu": 0.31622776601683794 } },
  "utility": { "family": "crra", "beta": 0.5 }
}"#,
    );
    let out = run_in(dir.path(), &["solve", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("singular"), "stderr was: {stderr}");
}

#[test]
fn verify_passes_by_default_and_reports_injected_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS ")).count(), 13);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("FAIL ")).count(), 0);
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("verify.json")).unwrap()).unwrap();
    assert!(report["all_pass"].as_bool().unwrap());
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"feedback_singularity_guard"));
    assert!(names.contains(&"budget_hara"));
}

#[test]
fn compare_writes_three_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["compare"]);
    assert_eq!(out.status.code(), Some(0));
    for name in ["utility_vs_mu.csv", "value_vs_sigma_mu.csv", "feedback_vs_w.csv"] {
        assert!(dir.path().join(name).is_file(), "{name} missing");
    }
    let text = std::fs::read_to_string(dir.path().join("utility_vs_mu.csv")).unwrap();
    assert!(text.starts_with("mu,eu_ambiguity,eu_neutral\n"));
    assert_eq!(text.lines().count(), 42, "header plus the 41 default grid points");
}

#[test]
fn sweep_headers_follow_the_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["sweep"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("sweep_gamma.csv")).unwrap();
    assert!(text.starts_with("param,pi0\n"));

    let config = write_config(
        dir.path(),
        "beta.json",
        r#"{ "sweep": { "parameter": "beta" } }"#,
    );
    let out = run_in(dir.path(), &["sweep", "--config", &config]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("sweep_beta.csv")).unwrap();
    assert!(text.starts_with("param,pi0\n"));

    let config = write_config(
        dir.path(),
        "smu.json",
        r#"{ "sweep": { "parameter": "sigma_mu", "gammas": [-0.5, 0.0, 0.5] } }"#,
    );
    let out = run_in(dir.path(), &["sweep", "--config", &config]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("sweep_sigma_mu.csv")).unwrap();
    assert!(text.starts_with("param,pi0_gamma_-0.5,pi0_gamma_0,pi0_gamma_0.5\n"));

    let config = write_config(
        dir.path(),
        "smu_one.json",
        r#"{ "sweep": { "parameter": "sigma_mu", "gammas": [-0.5] } }"#,
    );
    let out = run_in(dir.path(), &["sweep", "--config", &config]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("sweep_sigma_mu.csv")).unwrap();
    assert!(text.starts_with("param,pi0\n"));
}

#[test]
fn json_output_format_is_available() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "json_out.json",
        &TWO_POINT.replace("\"ambiguity\"", "\"output\": { \"format\": \"json\" }, \"ambiguity\""),
    );
    let out = run_in(dir.path(), &["frontier", "--config", &config]);
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("frontier.json")).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 21);
    assert!(rows[0]["kappa"].as_f64().is_some());
}

#[test]
fn command_line_overrides_are_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(bin())
        .args(["solve", "--gh-nodes", "64", "--seed", "1"])
        .arg("--out")
        .arg(dir.path().join("nested/deeper"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("nested/deeper/solve.json").is_file());

    // an out-of-range node count must be rejected up front
    let out = run_in(dir.path(), &["solve", "--gh-nodes", "100000"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_prints_and_exits_cleanly() {
    let out = Command::new(bin()).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for sub in ["solve", "frontier", "fixed-point", "compare", "sweep", "verify"] {
        assert!(stdout.contains(sub), "help must list {sub}");
    }
    let out = Command::new(bin()).arg("not-a-command").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

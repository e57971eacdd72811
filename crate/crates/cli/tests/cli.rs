//! End-to-end tests of the `ramsey` binary: output schemas, determinism,
//! exit codes, and the tabulated-model file interface.

use std::process::{Command, Output};

fn ramsey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramsey"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = ramsey(args);
    assert!(
        out.status.success(),
        "command failed: {:?}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn schema_validator() -> jsonschema::Validator {
    let schema: serde_json::Value = serde_json::from_str(include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../schemas/output.schema.json"
    )))
    .expect("schema parses");
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn assert_valid_json(text: &str) -> serde_json::Value {
    let value: serde_json::Value = serde_json::from_str(text).expect("stdout is JSON");
    let validator = schema_validator();
    if let Err(err) = validator.validate(&value) {
        panic!("schema violation: {err}");
    }
    value
}

#[test]
fn qfi_json_matches_the_analytic_formula() {
    let text = stdout_of(&[
        "qfi", "--state", "ghz", "--n", "4", "--t", "1", "--gamma", "0.1", "--model",
        "markovian", "--geometry", "local", "--format", "json",
    ]);
    let value = assert_valid_json(&text);
    let gap = value["results"]["relative_gap"].as_f64().unwrap();
    assert!(gap <= 1e-8, "relative gap {gap}");
    let analytic = value["results"]["qfi_analytic"].as_f64().unwrap();
    assert!((analytic - 16.0 * (-0.8f64).exp()).abs() < 1e-12);
}

#[test]
fn every_command_emits_schema_valid_json() {
    let runs: Vec<Vec<&str>> = vec![
        vec![
            "qfi", "--state", "random:3", "--n", "3", "--t", "0.5", "--gamma", "0.4", "--model",
            "zeno", "--geometry", "collective",
        ],
        vec![
            "bounds", "--n", "4", "--t", "1", "--gamma", "0.5", "--model", "zeno", "--t-total",
            "2", "--state", "ghz",
        ],
        vec![
            "optimize", "--state", "ghz", "--n", "4", "--geometry", "local", "--model",
            "markovian", "--gamma", "1", "--t-total", "1",
        ],
        vec![
            "verify-uniform", "--n-experiments", "2", "--t-total", "1", "--c", "0.25", "--gamma",
            "1", "--trials", "4", "--seed", "1",
        ],
        vec![
            "scaling", "--state", "ghz", "--geometry", "local", "--model", "zeno", "--gamma",
            "1", "--t-total", "1", "--n-min", "10", "--n-max", "100", "--points-per-decade", "5",
        ],
        vec![
            "figure", "--n-min", "10", "--n-max", "100", "--t-total", "1", "--gamma", "1",
            "--points-per-decade", "5",
        ],
    ];
    for args in runs {
        let text = stdout_of(&args);
        assert_valid_json(&text);
    }
}

#[test]
fn optimize_css_markovian_puts_t_star_at_half_inverse_rate() {
    let text = stdout_of(&[
        "optimize", "--state", "css", "--n", "8", "--geometry", "local", "--model", "markovian",
        "--gamma", "0.5", "--t-total", "1",
    ]);
    let value = assert_valid_json(&text);
    let t_star = value["results"]["t_star"].as_f64().unwrap();
    assert!((t_star - 1.0).abs() < 1e-12);
    assert_eq!(value["results"]["method"], "closed_form");
}

#[test]
fn identical_flags_give_byte_identical_output() {
    let args = [
        "qfi", "--state", "random:7", "--n", "3", "--t", "0.8", "--gamma", "0.3", "--model",
        "zeno", "--geometry", "local",
    ];
    assert_eq!(stdout_of(&args), stdout_of(&args));
    let figure = [
        "figure", "--n-min", "10", "--n-max", "1000", "--t-total", "1", "--gamma", "1",
        "--format", "csv",
    ];
    assert_eq!(stdout_of(&figure), stdout_of(&figure));
}

#[test]
fn csv_headers_are_stable() {
    let scaling = stdout_of(&[
        "scaling", "--state", "css", "--geometry", "local", "--model", "markovian", "--gamma",
        "0.5", "--t-total", "1", "--n-min", "10", "--n-max", "100", "--points-per-decade", "4",
        "--format", "csv",
    ]);
    assert!(scaling.starts_with("N,f_max,t_star\n"));
    let figure = stdout_of(&[
        "figure", "--n-min", "10", "--n-max", "100", "--t-total", "1", "--gamma", "1",
        "--points-per-decade", "4", "--format", "csv",
    ]);
    assert!(figure.starts_with("line,N,resolution\n"));
    let bounds = stdout_of(&[
        "bounds", "--n", "2", "--t", "1", "--gamma", "0.5", "--model", "markovian", "--format",
        "csv",
    ]);
    assert!(bounds.starts_with("bound,value,t_opt\n"));
}

#[test]
fn usage_errors_exit_2_with_single_line_message() {
    for args in [
        vec!["qfi", "--bogus"],
        vec![
            "qfi", "--state", "nonsense", "--n", "2", "--t", "1", "--gamma", "1", "--model",
            "markovian", "--geometry", "local",
        ],
        vec![
            "qfi", "--state", "ghz", "--n", "2", "--t", "1", "--model", "markovian",
            "--geometry", "local",
        ],
        vec![
            "scaling", "--state", "ghz", "--geometry", "local", "--model", "zeno", "--gamma",
            "-1", "--t-total", "1",
        ],
    ] {
        let out = ramsey(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert_eq!(stderr.lines().count(), 1, "stderr: {stderr}");
        assert!(stderr.starts_with("error: usage: "), "stderr: {stderr}");
    }
}

#[test]
fn domain_errors_exit_1_with_single_line_message() {
    for args in [
        // Dense limit.
        vec![
            "qfi", "--state", "ghz", "--n", "20", "--t", "1", "--gamma", "0.1", "--model",
            "markovian", "--geometry", "local",
        ],
        // Missing tabulated file.
        vec![
            "qfi", "--state", "ghz", "--n", "2", "--t", "1", "--model",
            "tabulated:/nonexistent/g.csv", "--geometry", "local",
        ],
    ] {
        let out = ramsey(&args);
        assert_eq!(out.status.code(), Some(1), "args {args:?}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert_eq!(stderr.lines().count(), 1, "stderr: {stderr}");
        assert!(stderr.starts_with("error: domain: "), "stderr: {stderr}");
    }
}

#[test]
fn help_and_version_exit_0() {
    for args in [vec!["--help"], vec!["--version"], vec!["qfi", "--help"]] {
        let out = ramsey(&args);
        assert_eq!(out.status.code(), Some(0), "args {args:?}");
    }
    let help = ramsey(&["--help"]);
    let text = String::from_utf8_lossy(&help.stdout);
    assert!(text.contains("no unit conversion"));
}

#[test]
fn tabulated_model_loads_from_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gamma.csv");
    // Piecewise-linear table that agrees with markovian rate 0.1 on [0, 2].
    std::fs::write(&path, "t,gamma\n0,0\n1.0,0.1\n2.0,0.2\n").unwrap();
    let model_arg = format!("tabulated:{}", path.display());
    let tabulated = stdout_of(&[
        "qfi", "--state", "ghz", "--n", "3", "--t", "1.5", "--model", &model_arg, "--geometry",
        "local",
    ]);
    let markovian = stdout_of(&[
        "qfi", "--state", "ghz", "--n", "3", "--t", "1.5", "--gamma", "0.1", "--model",
        "markovian", "--geometry", "local",
    ]);
    let tab: serde_json::Value = serde_json::from_str(&tabulated).unwrap();
    let mar: serde_json::Value = serde_json::from_str(&markovian).unwrap();
    let a = tab["results"]["qfi_exact"].as_f64().unwrap();
    let b = mar["results"]["qfi_exact"].as_f64().unwrap();
    assert!((a - b).abs() <= 1e-10 * b, "{a} vs {b}");

    // Interrogation time beyond the table is a domain error.
    let out = ramsey(&[
        "qfi", "--state", "ghz", "--n", "3", "--t", "2.5", "--model", &model_arg, "--geometry",
        "local",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_flag_writes_the_artifact_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let path_arg = path.to_str().unwrap();
    let out = ramsey(&[
        "figure", "--n-min", "10", "--n-max", "100", "--t-total", "1", "--gamma", "1",
        "--points-per-decade", "3", "--format", "csv", "--output", path_arg,
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("line,N,resolution\n"));
}

#[test]
fn out_of_regime_figure_reports_ordering_warnings() {
    let text = stdout_of(&[
        "figure", "--n-min", "10", "--n-max", "100", "--t-total", "0.1", "--gamma", "0.05",
        "--points-per-decade", "3",
    ]);
    let value = assert_valid_json(&text);
    assert!(!value["warnings"].as_array().unwrap().is_empty());
}

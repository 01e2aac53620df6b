//! End-to-end tests of the command surface: flag handling, file formats,
//! exit codes, and agreement with the library on hand-checked values.

use std::path::Path;
use std::process::{Command, Output};

fn tailweight(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailweight"))
        .args(args)
        .current_dir(dir)
        .env_remove("TAILWEIGHT_THREADS")
        .output()
        .expect("binary runs")
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn write_exp_file(dir: &Path, name: &str, powers: &[f64]) {
    let mut text = String::from("x\n");
    for &p in powers {
        text.push_str(&format!("{}\n", p.exp()));
    }
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn sample_is_deterministic_and_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sample", "--model", "pareto", "--gamma", "1", "--n", "5", "--seed", "7", "--out", "a.csv",
    ];
    assert_code(&tailweight(&args, dir.path()), 0);
    let first = std::fs::read(dir.path().join("a.csv")).unwrap();
    let first_meta = std::fs::read(dir.path().join("a.csv.meta.json")).unwrap();
    assert_code(&tailweight(&args, dir.path()), 0);
    assert_eq!(first, std::fs::read(dir.path().join("a.csv")).unwrap());
    assert_eq!(
        first_meta,
        std::fs::read(dir.path().join("a.csv.meta.json")).unwrap()
    );
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("x\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn sample_hall_values_are_positive() {
    let dir = tempfile::tempdir().unwrap();
    let out = tailweight(
        &[
            "sample", "--model", "hall", "--gamma", "1", "--d1", "1", "--d2", "0.5", "--beta",
            "0.75", "--n", "500", "--seed", "42", "--out", "h.csv",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    let text = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
    let values: Vec<f64> = text.lines().skip(1).map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 500);
    assert!(values.iter().all(|&v| v > 0.0));
}

#[test]
fn sample_rejects_zero_d2() {
    let dir = tempfile::tempdir().unwrap();
    let out = tailweight(
        &[
            "sample", "--model", "hall", "--gamma", "1", "--d1", "1", "--d2", "0", "--beta", "1",
            "--n", "5", "--seed", "7",
        ],
        dir.path(),
    );
    assert_code(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("D2"));
}

#[test]
fn estimate_hill_hand_value() {
    let dir = tempfile::tempdir().unwrap();
    write_exp_file(dir.path(), "es.csv", &[1.0, 2.0, 3.0, 4.0]);
    let out = tailweight(
        &[
            "estimate", "--input", "es.csv", "--method", "hill", "--k", "2",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let hill = report["estimates"]["hill"].as_f64().unwrap();
    assert!((hill - 1.5).abs() < 1e-12);
}

#[test]
fn estimate_wps_hand_value_with_interval() {
    let dir = tempfile::tempdir().unwrap();
    write_exp_file(dir.path(), "es.csv", &[1.0, 2.0, 3.0]);
    let out = tailweight(
        &[
            "estimate", "--input", "es.csv", "--method", "wps", "--p", "1", "--rho", "0", "--k",
            "1",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let wps = report["estimates"]["wps"].as_f64().unwrap();
    assert!((wps - 2.730_717_679_880_512).abs() < 1e-12);
    assert!(report["wps"]["ci_lower"].as_f64().unwrap() <= wps);
    assert!(report["wps"]["ci_upper"].as_f64().unwrap() >= 0.0);
}

#[test]
fn estimate_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    write_exp_file(dir.path(), "es.csv", &[1.0, 2.0, 3.0, 4.0]);
    let out = tailweight(
        &[
            "estimate", "--input", "es.csv", "--method", "hill", "--k", "2", "--format", "csv",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("method,estimate,t_n,ci_lower,ci_upper\n"));
    assert!(text.contains("hill,1.5"));
}

#[test]
fn estimate_pickands_rejects_large_k() {
    let dir = tempfile::tempdir().unwrap();
    // 1000 observations but 4k = 1200 > n.
    assert_code(
        &tailweight(
            &[
                "sample", "--model", "pareto", "--gamma", "1", "--n", "1000", "--seed", "3",
                "--out", "p.csv",
            ],
            dir.path(),
        ),
        0,
    );
    let out = tailweight(
        &[
            "estimate", "--input", "p.csv", "--method", "pickands", "--k", "300",
        ],
        dir.path(),
    );
    assert_code(&out, 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("pickands"), "stderr: {stderr}");
}

#[test]
fn estimate_reports_malformed_row_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "x\n1.5\nnot-a-number\n").unwrap();
    let out = tailweight(
        &[
            "estimate", "--input", "bad.csv", "--method", "hill", "--k", "1",
        ],
        dir.path(),
    );
    assert_code(&out, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains(":3:"));
}

#[test]
fn estimate_degenerate_sample_is_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("flat.csv"), "x\n3\n3\n3\n").unwrap();
    let out = tailweight(
        &[
            "estimate", "--input", "flat.csv", "--method", "moment", "--k", "2",
        ],
        dir.path(),
    );
    assert_code(&out, 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("moment"));
}

#[test]
fn estimate_missing_input_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = tailweight(
        &[
            "estimate", "--input", "nope.csv", "--method", "hill", "--k", "1",
        ],
        dir.path(),
    );
    assert_code(&out, 3);
}

#[test]
fn reingesting_a_written_sample_reproduces_estimates_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    assert_code(
        &tailweight(
            &[
                "sample", "--model", "pareto", "--gamma", "1", "--n", "500", "--seed", "11",
                "--out", "s.csv",
            ],
            dir.path(),
        ),
        0,
    );
    let out = tailweight(
        &[
            "estimate", "--input", "s.csv", "--method", "all", "--k", "50", "--p", "2", "--rho",
            "1",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();

    // The same estimates computed in-process, without the CSV round trip.
    let model = tailweight::models::QuantileModel::pareto(1.0).unwrap();
    let mut stream = tailweight::rng::RngStream::new(11, 0);
    let sample = tailweight::rng::sample_model(&model, 500, &mut stream);
    let sorted = tailweight::estimators::order_statistics(&sample).unwrap();
    let spec = tailweight::estimators::EstimatorSpec::new(
        2.0,
        50,
        tailweight::weights::WeightScheme::new(1.0).unwrap(),
    )
    .unwrap();
    let wps = tailweight::estimators::gamma_wps(&sorted, &spec).unwrap();
    let hill = tailweight::estimators::hill(&sorted, 50).unwrap();

    assert_eq!(report["estimates"]["wps"].as_f64().unwrap(), wps);
    assert_eq!(report["estimates"]["hill"].as_f64().unwrap(), hill);
}

#[test]
fn table_smoke_run_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("plan.json"),
        r#"{"model":"pareto","gammas":[1.0,2.0],"rhos":[0.0,1.0],"ps":[1.0],
            "n":200,"k":20,"replications":500,"seed":5}"#,
    )
    .unwrap();
    let out = tailweight(
        &[
            "table",
            "--plan",
            "plan.json",
            "--out",
            "t.csv",
            "--replications",
            "1",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(text.starts_with("estimator,rho,gamma,p,mean,mse\n"));
    // 4 wps cells + 3 comparators x 2 gammas.
    assert_eq!(text.lines().count(), 1 + 4 + 6);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.csv.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["plan"]["replications"].as_u64(), Some(1));
    assert_eq!(meta["seed"].as_u64(), Some(5));
}

#[test]
fn table_rejects_invalid_plan() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("plan.json"),
        r#"{"model":"pareto","gammas":[1.0],"rhos":[0.0],"ps":[1.0],
            "n":100,"k":100,"replications":5,"seed":5}"#,
    )
    .unwrap();
    let out = tailweight(
        &["table", "--plan", "plan.json", "--out", "t.csv"],
        dir.path(),
    );
    assert_code(&out, 2);
}

#[test]
fn table_unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("plan.json"),
        r#"{"model":"pareto","gammas":[1.0],"rhos":[0.0],"ps":[1.0],
            "n":100,"k":10,"replications":1,"seed":5}"#,
    )
    .unwrap();
    let out = tailweight(
        &["table", "--plan", "plan.json", "--out", "no-such-dir/t.csv"],
        dir.path(),
    );
    assert_code(&out, 3);
}

#[test]
fn zn_study_writes_consistent_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("zn.json"),
        r#"{"model":"frechet","gamma":1.0,"rho":1.0,"p":1.0,
            "n":300,"k":10,"replications":200,"seed":9}"#,
    )
    .unwrap();
    let args = [
        "zn-study",
        "--plan",
        "zn.json",
        "--out-summary",
        "s.json",
        "--out-histogram",
        "h.csv",
    ];
    assert_code(&tailweight(&args, dir.path()), 0);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(summary["replications"].as_u64(), Some(200));
    assert!(summary["chi2_pvalue"].as_f64().unwrap() >= 0.0);

    let hist = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
    assert!(hist.starts_with("bin_left,bin_right,count,fitted_density_at_midpoint\n"));
    let total: u64 = hist
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 200);

    // Re-running with the same seed reproduces every byte.
    let s1 = std::fs::read(dir.path().join("s.json")).unwrap();
    let h1 = std::fs::read(dir.path().join("h.csv")).unwrap();
    assert_code(&tailweight(&args, dir.path()), 0);
    assert_eq!(s1, std::fs::read(dir.path().join("s.json")).unwrap());
    assert_eq!(h1, std::fs::read(dir.path().join("h.csv")).unwrap());
}

#[test]
fn diagnose_b1_constant_factor_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = tailweight(
        &[
            "diagnose-b1",
            "--d1",
            "2",
            "--d2",
            "0",
            "--beta",
            "1",
            "--gamma",
            "1",
            "--n",
            "1000",
            "--k",
            "100",
        ],
        dir.path(),
    );
    assert_code(&out, 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let v = report["b1_diagnostic"].as_f64().unwrap();
    assert!((v - 6.931_471_805_599_453).abs() < 1e-9);
    assert!(!report["kn_warnings"].as_array().unwrap().is_empty());
}

#[test]
fn threads_env_var_is_honored_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_tailweight"))
        .args([
            "sample", "--model", "pareto", "--gamma", "1", "--n", "3", "--seed", "1",
        ])
        .current_dir(dir.path())
        .env("TAILWEIGHT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = Command::new(env!("CARGO_BIN_EXE_tailweight"))
        .args([
            "sample", "--model", "pareto", "--gamma", "1", "--n", "3", "--seed", "1",
        ])
        .current_dir(dir.path())
        .env("TAILWEIGHT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

use std::process::{Command, Output};

fn cesaro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cesaro")).args(args).env_remove("CESARO_WORKERS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn coeffs_csv_and_json() {
    let o = cesaro(&["coeffs", "--n", "2", "--alpha", "1/2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema=1"));
    assert_eq!(lines.next(), Some("k,c_k"));
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values[0], 1.0);
    assert!((values[1] - 0.8).abs() < 1e-15);
    assert!((values[2] - 8.0 / 15.0).abs() < 1e-15);

    let o = cesaro(&["coeffs", "--n", "3", "--alpha", "1", "--format", "json", "--method", "gamma"]);
    let v = json(&o);
    assert!((v["coefficients"][3]["c_k"].as_f64().unwrap() - 0.25).abs() < 1e-14);
}

#[test]
fn decimal_and_fraction_alpha_agree() {
    let a = stdout(&cesaro(&["coeffs", "--n", "50", "--alpha", "0.5"]));
    let b = stdout(&cesaro(&["coeffs", "--n", "50", "--alpha", "1/2"]));
    assert_eq!(a, b);
}

#[test]
fn norm_json_fields() {
    let o = cesaro(&["norm", "--n", "10", "--alpha", "0"]);
    assert!(o.status.success());
    let v = json(&o);
    for key in ["n", "alpha", "norm", "norm_sq", "iterations", "residual", "coeff_lower_bound"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!((v["norm_sq"].as_f64().unwrap() - 11.0).abs() < 1e-9);
}

#[test]
fn norm_iteration_cap_exits_one() {
    let o = cesaro(&["norm", "--n", "4096", "--alpha", "0.9", "--tol", "1e-15", "--max-iter", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(json(&o)["norm"].as_f64().unwrap() > 0.0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("did not converge"));
}

#[test]
fn bounds_columns() {
    let o = cesaro(&["bounds", "--n", "10,100", "--alpha", "0,0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[1], "n,alpha,S,upper,best_lower,best_m,closed_upper,closed_lower_at_proof_m");
    assert_eq!(lines.len(), 6);
    // no closed forms at the endpoint
    assert!(lines[2].ends_with(",,"));
}

#[test]
fn dirichlet_seminorm_and_quotient() {
    let o = cesaro(&["dirichlet", "0,0,0,0:1", "--zeta-arg", "-1.3"]);
    assert!(o.status.success());
    assert!((json(&o)["seminorm"].as_f64().unwrap() - 3.0).abs() < 1e-12);

    let o = cesaro(&["dirichlet", "4,-5,0,0,0,1", "--kernel", "4,1"]);
    let v = json(&o);
    assert!((v["rayleigh_quotient"].as_f64().unwrap() - 0.8).abs() < 1e-12);

    let o = cesaro(&["dirichlet", "1,x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn constants_agree() {
    let o = cesaro(&["constants", "--alpha", "0.1"]);
    assert!(o.status.success());
    let v = json(&o);
    assert!((v["gamma"].as_f64().unwrap() - 0.960_579_201_272_421_5).abs() < 1e-12);
    assert!(v["max_pairwise_gap"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn sweep_output_is_reproducible_and_round_trips() {
    let args = ["sweep", "--alphas", "0,1/2,1", "--n-values", "8,16,32", "--workers", "2"];
    let a = cesaro(&args);
    let b = cesaro(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("# schema=1\n"));
    assert_eq!(text.lines().count(), 2 + 9);
    for line in text.lines().skip(2) {
        for field in line.split(',') {
            if let Ok(x) = field.parse::<f64>() {
                assert_eq!(format!("{x:.16e}").parse::<f64>().unwrap(), x);
            }
        }
    }
}

#[test]
fn sweep_writes_out_file() {
    let dir = std::env::temp_dir().join(format!("cesaro-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.json");
    let o = cesaro(&["sweep", "--alphas", "0.25", "--n-values", "8,16", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn workers_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_cesaro"))
        .args(["sweep", "--alphas", "0", "--n-values", "8"])
        .env("CESARO_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cesaro(&["norm", "--n", "10", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(cesaro(&["norm", "--n", "10", "--alpha", "1/0"]).status.code(), Some(2));
    assert_eq!(cesaro(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cesaro(&["sweep", "--n-values", "16,8"]).status.code(), Some(2));
    let o = cesaro(&["norm", "--n", "100000000", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource guard"));
}

#[test]
fn verify_paper_suite() {
    let o = cesaro(&["verify", "--suite", "paper"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("0 failed"));
}

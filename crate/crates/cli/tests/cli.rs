use std::io::Write;
use std::process::Command;

use cst_cli::{run, Status, EXIT_COMPUTATION, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn cst(args: &[&str]) -> cst_cli::CommandResult {
    run(std::iter::once("cst").chain(args.iter().copied()))
}

fn binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cst")).args(args).output().expect("binary runs")
}

fn temp_json(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn entropy_of_three_mme() {
    let r = cst(&["entropy", "--family", "three_mme", "--tol", "1e-10"]);
    assert_eq!(r.status, Status::Ok);
    assert_eq!(r.exit_code, EXIT_OK);
    let lambda = r.payload["lambda_star"].as_f64().unwrap();
    assert!((lambda - 2.0).abs() < 1e-10);
    assert!((r.payload["h_top"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-10);
    assert_eq!(r.payload["status"], "converged");
    assert_eq!(r.payload["tol"].as_f64(), Some(1e-10));
}

#[test]
fn missing_genset_file_is_a_computation_error() {
    let out = binary(&["entropy", "--genset", "missing.json"]);
    assert_eq!(out.status.code(), Some(EXIT_COMPUTATION));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
    let payload: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(payload["error"], "computation");
}

#[test]
fn malformed_genset_names_the_field() {
    let f = temp_json(r#"{"kind": "explicit", "alphabet": ["0", "1"], "words": ["0", "2"]}"#);
    let r = cst(&["entropy", "--genset", f.path().to_str().unwrap()]);
    assert_eq!(r.exit_code, EXIT_COMPUTATION);
    assert!(r.payload["message"].as_str().unwrap().contains("words"), "{}", r.payload);
}

#[test]
fn explicit_genset_file() {
    let f = temp_json(r#"{"kind": "explicit", "alphabet": ["0", "1"], "words": ["0", "01"]}"#);
    let r = cst(&["entropy", "--genset", f.path().to_str().unwrap()]);
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((r.payload["lambda_star"].as_f64().unwrap() - golden).abs() < 1e-11);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["frobnicate"][..],
        &["entropy", "--family", "three_mme", "--bogus"],
        &["entropy"],
        &["entropy", "--family", "dyck", "--tol", "2"],
        &["entropy", "--family", "beta", "--params", "{not json"],
    ] {
        let r = cst(args);
        assert_eq!(r.exit_code, EXIT_USAGE, "{args:?}");
        assert_eq!(r.status, Status::Error);
        assert!(!r.diagnostics.is_empty());
    }
}

#[test]
fn unknown_family_is_a_computation_error() {
    assert_eq!(cst(&["entropy", "--family", "nope"]).exit_code, EXIT_COMPUTATION);
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let a = binary(&["sample", "--family", "dyck_g1", "--len", "100", "--seed", "7"]);
    let b = binary(&["sample", "--family", "dyck_g1", "--len", "100", "--seed", "7"]);
    let c = binary(&["sample", "--family", "dyck_g1", "--len", "100", "--seed", "8"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let payload: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(payload["windows"][0]["word"].as_str().unwrap().len(), 100);
}

#[test]
fn block_counts_sum_to_samples() {
    let r = cst(&["sample", "--family", "three_mme", "--block-n", "3", "--count", "500", "--seed", "1"]);
    let total: u64 = r.payload["counts"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 500);
}

#[test]
fn payloads_round_trip() {
    let commands: [&[&str]; 11] = [
        &["entropy", "--family", "dyck"],
        &["pressure", "--family", "three_mme", "--potential", r#"{"slope": 0.5, "overrides": {"024": 1.0}}"#],
        &["mme", "--family", "dyck_g1"],
        &["cylinder", "--family", "dyck_g1", "--word", "(]", "--word", "()"],
        &["gibbs", "--family", "nongibbs", "--word", "0011", "--max-gen-len", "64"],
        &["sample", "--family", "sgap", "--params", r#"{"S": [1, 2]}"#, "--count", "3"],
        &["ud-check", "--family", "three_mme", "--max-gen-len", "3"],
        &["family", "--name", "beta", "--params", r#"{"beta": 2.5}"#],
        &["construct", "theorem-a"],
        &["language", "--family", "three_mme", "--m", "4", "--n", "12"],
        &["sofic", "--family", "three_mme", "--max-gen-len", "6"],
    ];
    for args in commands {
        let r = cst(args);
        assert_eq!(r.status, Status::Ok, "{args:?}: {}", r.payload);
        let text = serde_json::to_string(&r.payload).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text, "{args:?}");
    }
}

#[test]
fn pressure_with_length_potential_shifts_entropy() {
    // sum_g e^{t|g|} lambda^{-|g|} = 1 has root e^t lambda*
    let r = cst(&["pressure", "--family", "three_mme", "--potential", r#"{"slope": 0.25}"#]);
    assert!((r.payload["pressure"].as_f64().unwrap() - (2f64.ln() + 0.25)).abs() < 1e-10);
}

#[test]
fn theorem_a_from_sft_file() {
    let f = temp_json(r#"{"alphabet": ["0", "1"], "forbidden": ["11"], "periodic": "0"}"#);
    let r = cst(&["construct", "theorem-a", "--sft", f.path().to_str().unwrap(), "--epsilon", "0.1", "--n", "4"]);
    assert_eq!(r.status, Status::Ok);
    assert_eq!(r.payload["generators"].as_array().unwrap().len(), 4);
    assert_eq!(r.payload["certificate"]["certified"], true);
    assert_eq!(r.payload["generators"][0], format!("10101{}1", "0".repeat(11)));
}

#[test]
fn augmentation_reports_its_root() {
    let r = cst(&["construct", "augment", "--family", "three_mme", "--epsilon", "0.05", "--depth", "1"]);
    assert_eq!(r.status, Status::Ok, "{}", r.payload);
    let lt = r.payload["lambda_tilde"].as_f64().unwrap();
    assert!(lt > 2.0 && lt < 2.0 * 0.05f64.exp());
}

#[test]
fn language_of_golden_mean_counts_fibonacci() {
    let f = temp_json(r#"{"kind": "explicit", "alphabet": ["0", "1"], "words": ["0", "01"]}"#);
    let r = cst(&["language", "--genset", f.path().to_str().unwrap(), "--m", "2", "--n", "10"]);
    let counts: Vec<u64> = r.payload["counts"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().parse().unwrap()).collect();
    assert_eq!(counts, [1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144]);
}

#[test]
fn family_listing_without_a_name() {
    let r = cst(&["family"]);
    assert!(r.payload["families"].as_array().unwrap().iter().any(|v| v == "dyck"));
    let r = cst(&["family", "--family", "dyck", "--max-gen-len", "4"]);
    assert_eq!(r.payload["counts"], serde_json::json!(["0", "2", "0", "4"]));
}

use std::process::{Command, Output};

fn d4lift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_d4lift")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn error_code(out: &Output) -> String {
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).expect("JSON error document");
    doc["error"]["code"].as_str().unwrap().to_string()
}

#[test]
fn reduce_drops_even_terms() {
    let out = d4lift(&["reduce", "--field", "gf2", "z^-2"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("representative:  z^-1\n"));

    let out = d4lift(&["reduce", "--field", "gf2", "z^-2", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["representative"], "z^-1");
    assert_eq!(doc["pole_order"], 1);
}

#[test]
fn verify_identity_reports_zero_residual() {
    for args in [&["verify-identity", "--m", "3"][..], &["verify-identity"][..]] {
        let out = d4lift(args);
        assert!(out.status.success());
        assert_eq!(stdout(&out).trim(), "identity holds (symbolic, residual = 0)");
    }
}

#[test]
fn non_supersimple_class_fails_descent() {
    let out = d4lift(&["classify", "--field", "gf2_8", "a*v^-7 + v^-1", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_code(&out), "DescentFailed");
}

#[test]
fn classify_then_lift_from_the_same_class() {
    let out = d4lift(&["classify", "--field", "gf2_8", "a*v^-3 + a^2*v^-1", "--json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["d"], 1);

    let out = d4lift(&["lift", "--field", "gf2_8", "a*v^-3 + a^2*v^-1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("reduction matches:   true"));
}

#[test]
fn trace_obstruction_needs_auto_extend() {
    let plain = d4lift(&["classify", "--field", "gf2_2", "a*v^-3", "--json"]);
    assert_eq!(plain.status.code(), Some(1));
    assert_eq!(error_code(&plain), "NoSolutionInField");

    let out = d4lift(&["classify", "--field", "gf2_2", "a*v^-3", "--auto-extend", "--json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["field"], "gf2_4");
    assert_eq!(doc["extended_from"], "gf2_2");
}

#[test]
fn lift_certificate_round_trips_through_verify_cert() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let path = path.to_str().unwrap();
    let args = ["lift", "--field", "gf2_8", "--eta", "a^3 + a", "--q", "a*t^-5 + t^-3 + a^7*t^-1"];
    let out = d4lift(&[&args[..], &["--json", "--out", path]].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let written = std::fs::read_to_string(path).unwrap();
    assert_eq!(written, stdout(&out));

    let out = d4lift(&["verify-cert", path]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("certificate verified\n"));

    let tampered = written.replacen("\"hurwitz_consistent\": true", "\"hurwitz_consistent\": false", 1);
    assert_ne!(tampered, written);
    std::fs::write(path, tampered).unwrap();
    let out = d4lift(&["verify-cert", path, "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_code(&out), "CertificateError");
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let args = ["lift", "--field", "gf2_16", "--eta", "a^9 + a", "--q", "a^2*t^-7 + t^-1", "--json"];
    let first = d4lift(&args);
    let second = d4lift(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn parse_errors_exit_two_with_position() {
    let out = d4lift(&["reduce", "--field", "gf2_4", "v^-1 + * 2", "--json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_code(&out), "ParseError");
    assert!(stdout(&out).contains("position 7"));

    let out = d4lift(&["reduce", "--field", "gf3", "v^-1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = d4lift(&["lift", "--precision", "65", "--field", "gf2_8", "--eta", "a", "--q", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = d4lift(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eta_one_is_a_domain_error() {
    let out = d4lift(&["lift", "--field", "gf2_8", "--eta", "1", "--q", "t^-3", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_code(&out), "EtaIsOne");
}

#[test]
fn galois_test_and_genus() {
    let out = d4lift(&["galois-test", "--field", "gf2_4", "t^-3", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["galois"], true);

    let out = d4lift(&["galois-test", "--field", "gf2_4", "a*v^-3", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["galois"], false);
    assert_eq!(doc["supersimple"], true);

    let out = d4lift(&["genus", "--field", "gf2_4", "z^-7 + z^-4", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["genus"], 3);

    let out = d4lift(&["different", "--field", "gf2_8", "a*v^-9 + a*v^-3", "--json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["different"], 10);
    assert_eq!(doc["composite_different"], 10);
}

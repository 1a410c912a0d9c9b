use std::process::Command;

fn strata(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_strata")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn verify_all_on_interval_fixture_passes() {
    let report = std::env::temp_dir().join("strata-verify-report.json");
    let (code, out, _) = strata(&["verify-all", "--fixture", &fixture("interval.strata"), "--report", report.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["pass"], true);
    assert_eq!(json["criteria"].as_array().unwrap().len(), 13);
}

#[test]
fn mismatched_convolution_is_a_precondition_failure() {
    let (code, out, err) = strata(&["convolve", "eta", "kc", "--fixture", &fixture("demo.strata")]);
    assert_eq!(code, 3, "{err}");
    assert!(out.is_empty());
}

#[test]
fn oversized_link_hits_the_budget() {
    let (code, out, err) = strata(&["ss", "kc", "--budget", "2", "--fixture", &fixture("demo.strata")]);
    assert_eq!(code, 4, "{err}");
    assert!(out.is_empty());
}

#[test]
fn parse_errors_and_unknown_verbs() {
    let bad = std::env::temp_dir().join("strata-bad.strata");
    std::fs::write(&bad, "strata v1\nfield q\ncomplex c\nlo x\nend\n").unwrap();
    let (code, _, err) = strata(&["cohomology", "c", "--fixture", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 4"), "{err}");
    assert_eq!(strata(&["frobnicate"]).0, 2);
}

#[test]
fn computations_print_results() {
    let demo = fixture("demo.strata");
    assert_eq!(strata(&["gammac", "open", "--fixture", &demo]).1, "1:1\n");
    assert_eq!(strata(&["sections", "kc", "--fixture", &demo]).1, "0:1 1:1\n");
    assert_eq!(strata(&["microstalk", "end", "0", "1-", "--fixture", &demo]).1, "0:1\n");
    let (code, out, _) = strata(&["dual", "verdier", "open", "--fixture", &demo]);
    assert_eq!(code, 0);
    assert!(out.starts_with("strata v1\nfield q\nspace I simplicial\n"));
    let (code, out, _) = strata(&["check-triangles", "I", "--fixture", &demo]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 2);
}

#[test]
fn stop_verbs_report_checks() {
    let demo = fixture("demo.strata");
    let (code, out, _) = strata(&["sabloff", "circle2", "--fixture", &demo]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 17);
    assert_eq!(strata(&["verdier-compare", "circle2", "--fixture", &demo]).0, 0);
}

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn wallcross(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wallcross")).args(args).output().expect("binary runs")
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_wallcross"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const TWO_POINTS: &str = r#"{"points": [{"point": ["0", "0"]}, {"point": ["-1", "1"], "alpha": [1, 0]}], "cutoff": "6", "order": 6}"#;

#[test]
fn gauss_bonnet_for_24_points() {
    let out = wallcross(&["gauss-bonnet", "--focus-focus", "24"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["sum"], "2");
    assert_eq!(v["euler_characteristic"], 2);
}

#[test]
fn gauss_bonnet_failure_exits_one() {
    let out = wallcross(&["gauss-bonnet", "--focus-focus", "23"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["passed"], false);
    let torus = wallcross(&["gauss-bonnet", "--json", r#"{"genus": 1, "singularities": []}"#]);
    assert_eq!(torus.status.code(), Some(0));
    let quad = "a2 a3^-1 a2 a3^-1 a2 a3^-1 a2 a3^-1";
    let doc = serde_json::json!({ "genus": 0, "singularities": vec![quad; 6] }).to_string();
    let quads = wallcross(&["gauss-bonnet", "--json", &doc]);
    assert_eq!(quads.status.code(), Some(0));
    assert_eq!(json_of(&quads)["sum"], "2");
}

#[test]
fn malformed_json_reports_position() {
    let out = wallcross(&["factorize", "--json", "{\"order\": 4,\n \"walls\": [}"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2, column"), "{err}");
}

#[test]
fn invalid_parameters_exit_two() {
    assert_eq!(wallcross(&["factorize", "--f0", "1", "--finf", "1", "-k", "0"]).status.code(), Some(2));
    assert_eq!(wallcross(&["scatter", "--json", TWO_POINTS, "-C", "0"]).status.code(), Some(2));
    assert_eq!(wallcross(&["factorize", "--json", r#"{"walls": [], "extra": 1}"#]).status.code(), Some(2));
    assert_eq!(wallcross(&["factorize", "--f0", "x"]).status.code(), Some(2));
    assert_eq!(wallcross(&["check-all", "-k", "1"]).status.code(), Some(2));
    assert_eq!(wallcross(&["tropical", "-T", "0", "--json", r#"{"polys": []}"#]).status.code(), Some(2));
    assert_eq!(wallcross(&["factorize", "--input", "/nonexistent/walls.json"]).status.code(), Some(2));
}

#[test]
fn pentagon_from_flags_and_stdin() {
    let out = wallcross(&["factorize", "--f0", "1", "--finf", "1", "-k", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let slopes: Vec<&Value> = v["factorization"]["factors"].as_array().unwrap().iter().map(|f| &f["slope"]).collect();
    assert_eq!(slopes, [&serde_json::json!([1, 0]), &serde_json::json!([1, 1]), &serde_json::json!([0, 1])]);
    assert_eq!(v["integral"], true);

    let doc = r#"{"order": 6, "walls": [{"slope": [0, 1], "coeffs": ["1"]}, {"slope": [1, 0], "coeffs": ["1"]}]}"#;
    let piped = with_stdin(&["factorize", "--input", "-"], doc);
    assert_eq!(piped.status.code(), Some(0));
    assert_eq!(piped.stdout, out.stdout);
}

#[test]
fn scatter_json_is_reproducible() {
    let a = wallcross(&["scatter", "--json", TWO_POINTS]);
    let b = wallcross(&["scatter", "--json", TWO_POINTS]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["consistent"], true);
    assert_eq!(v["diagram"]["events"].as_array().unwrap().len(), 1);
}

#[test]
fn scatter_svg_to_file() {
    let path = std::env::temp_dir().join(format!("wallcross-{}.svg", std::process::id()));
    let out = wallcross(&["scatter", "--json", TWO_POINTS, "-f", "svg", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn monodromy_of_four_points() {
    let out = wallcross(&["monodromy", "--focus-focus", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["monodromy"]["linear"], serde_json::json!([[1, 4], [0, 1]]));
    assert_eq!(v["i"], "1/3");
    assert_eq!(v["unipotent_class"], 4);
}

#[test]
fn fixed_vectors_of_the_focus_focus_monodromy() {
    let doc = |lambda: &str| {
        format!(r#"{{"transitions": [{{"linear": [[1, 1], [0, 1]], "translation": ["0", "0"]}}], "lambda": {lambda}}}"#)
    };
    let v = json_of(&wallcross(&["monodromy", "--json", &doc(r#"["1", "1"]"#)]));
    assert_eq!(v["fixed_vectors"]["free_directions"].as_array().unwrap().len(), 1);
    assert_eq!(v["valuations_match"], true);
    let v = json_of(&wallcross(&["monodromy", "--json", &doc(r#"["1", {"terms": [[1, "1"]]}]"#)]));
    assert!(v["fixed_vectors"].is_null());
    assert_eq!(v["valuations_match"], true);
}

#[test]
fn tropical_additivity_and_svg() {
    let doc = r#"{"polys": [
        {"dim": 1, "terms": [{"exp": [0], "coeff": "1"}, {"exp": [1], "coeff": {"terms": [[1, "1"]]}}]},
        {"dim": 1, "terms": [{"exp": [-1], "coeff": "2"}, {"exp": [2], "coeff": {"terms": [[-2, "1"]]}}]}
    ]}"#;
    let out = wallcross(&["tropical", "--json", doc]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["additive"], true);
    let svg = wallcross(&["tropical", "--json", doc, "-f", "svg", "--lo", "-3", "--hi", "3"]);
    assert!(String::from_utf8_lossy(&svg.stdout).starts_with("<svg"));
}

#[test]
fn check_all_summary() {
    let out = wallcross(&["check-all", "--seed", "1", "-k", "6"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json_of(&out);
    let suites = v["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 8);
    assert!(suites.iter().all(|s| s["failures"].as_array().unwrap().is_empty()));
}

#[test]
fn check_all_is_deterministic() {
    let args = ["check-all", "--seed", "7", "-k", "5", "--suite", "tropical", "--suite", "poisson"];
    let a = wallcross(&args);
    let b = wallcross(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

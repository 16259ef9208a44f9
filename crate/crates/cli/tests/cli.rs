use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkwhitney")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn two_point_invariant_vanishes_in_positive_degree() {
    let out =
        run(&["gw", "--n", "3", "--ranks", "1,2", "--type", "2pt", "--sigma", "detS2", "--w", "123", "--d", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["value"], "0");
    assert_eq!(v["config"]["sigma"], "detS2");
    assert_eq!(v["config"]["qdeg"], 2);
}

#[test]
fn incidence_relations_pass() {
    let out = run(&["verify", "incidence", "--n", "3", "--qdeg", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "PASS");
    assert_eq!(v["config"]["command"], "verify incidence");
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS"));
}

#[test]
fn classical_dimension() {
    let out = run(&["verify", "classical", "--n", "3", "--ranks", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["details"]["expected"], 6);
    for d in v["details"]["dimensions"].as_array().unwrap() {
        assert_eq!(d["dimension"], 6);
    }
    let exact = json(&run(&["verify", "classical", "--n", "3", "--ranks", "1", "--coeffs", "exact"]));
    assert_eq!(exact["details"]["dimensions"][0]["dimension"], 3);
}

#[test]
fn mutations_exit_with_one() {
    let cases: [&[&str]; 3] = [
        &["verify", "incidence", "--n", "3", "--mutation", "drop-q2-rel2"],
        &["verify", "flag-reduction", "--n", "4", "--mutation", "skip-root-adjustment"],
        &["verify", "coulomb", "--n", "4", "--mutation", "drop-phi-q1-factor"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let v = json(&out);
        assert_eq!(v["status"], "FAIL");
        assert!(!v["witnesses"].as_array().unwrap().is_empty());
        assert_eq!(v["config"]["mutation"], args[args.len() - 1]);
    }
}

#[test]
fn usage_errors_exit_with_two_and_print_the_grammar() {
    for args in [
        &["verify", "nonsense"][..],
        &["gw", "--n", "3", "--type", "2pt", "--sigma", "detS9", "--w", "123", "--d", "0,1"],
        &["verify", "coulomb", "--n", "4", "--ranks", "2"],
        &["schubert", "--n", "3", "--w", "1x3"],
        &["verify", "classical", "--coeffs", "seed:abc"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(String::from_utf8_lossy(&out.stderr).contains("--ranks a,b,..."));
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["product", "--n", "4", "--ranks", "1,3", "--divisor", "det:2", "--sigma", "O_1243"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["product"]["basis"], "O^w");
}

#[test]
fn other_subcommands() {
    let v = json(&run(&["schubert", "--n", "3", "--w", "132"]));
    assert_eq!(v["euler_char"], "1");
    let v = json(&run(&["curve-nbhd", "--n", "3", "--ranks", "1,2", "--w", "123", "--d", "1,1"]));
    assert_eq!(v["label"], serde_json::json!([3, 2, 1]));
    assert_eq!(v["closed_form"], v["label"]);
    let v = json(&run(&[
        "gw",
        "--n",
        "4",
        "--ranks",
        "1,3",
        "--type",
        "3pt",
        "--divisor",
        "opp:1",
        "--sigma",
        "S1",
        "--w",
        "1234",
        "--d",
        "0,0",
    ]));
    assert_eq!(v["oracle"], "incidence-proven");
    let v = json(&run(&["table", "--n", "3", "--ranks", "1,2", "--qdeg", "1"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 6 * 4);
    let v = json(&run(&["table", "--kind", "gram", "--n", "3", "--ranks", "1"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn conditional_full_flag_table() {
    let out = run(&["table", "--kind", "products", "--n", "4", "--conditional"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["status"], "CONDITIONAL-PASS");
    assert_eq!(v["rows"].as_array().unwrap().len(), 72);
    // Without the flag the full flag variety has no proven oracle.
    assert_eq!(run(&["table", "--kind", "products", "--n", "4"]).status.code(), Some(2));
}

#[test]
fn presentation_check() {
    let out = run(&["verify", "presentation", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "PASS");
    let out = run(&["verify", "coulomb", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
}

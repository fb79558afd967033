//! Host-side tests of the JSON API the demo page consumes.

use serde_json::Value;

use nestrec_wasm::{builtins, eval_series, pipeline_check, run_machine};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).expect("valid JSON")
}

const EXAMPLE1_RIGHT: &str =
    "tagsystem\nrule a -> a b b\nrule b -> c\nrule c -> a\ninitial a b a b\n";
const EXAMPLE2: &str = "revtagsystem\nd a 0\nd b 2\ndelta a a -> b\ndelta a b -> b\n\
                        delta b a -> b\ndelta b b -> a\ninitial b a a a b\n";

#[test]
fn eval_series_returns_points() {
    let v = parse(&eval_series("G", 4, "raw"));
    assert_eq!(v["status"], "computed");
    assert_eq!(v["points"][0][0], 0);
    assert_eq!(v["points"][4][1], 3);
    assert_eq!(v["name"], "G");
}

#[test]
fn eval_series_accepts_definitions_and_transforms() {
    let v = parse(&eval_series(
        "name C\nstart 1\ninit 1=1, 2=1\ndef A(n) = A(A(n - 1)) + A(n - A(n - 1))",
        4,
        "minus-half-n",
    ));
    assert_eq!(v["status"], "computed");
    assert_eq!(v["points"][1][1], 0.0); // C(2) - 1 = 0
}

#[test]
fn eval_series_reports_witnesses() {
    let v = parse(&eval_series("def A(n) = A(n + 1); start 0", 10, "raw"));
    assert_eq!(v["status"], "noncalculable");
    assert_eq!(v["witness"]["at"], 0);
    assert_eq!(v["witness"]["arg"], 1);
}

#[test]
fn eval_series_rejects_bad_input() {
    assert!(parse(&eval_series("nonsense(((", 5, "raw"))["error"].is_string());
    assert!(parse(&eval_series("G", 5, "upside-down"))["error"].is_string());
}

#[test]
fn run_machine_traces_both_kinds() {
    let v = parse(&run_machine(EXAMPLE1_RIGHT, 50));
    assert_eq!(v["kind"], "tag");
    assert_eq!(v["status"], "halted@11");
    assert_eq!(v["rows"].as_array().unwrap().len(), 12);
    assert_eq!(v["rows"][0]["word"], "a b a b");
    assert_eq!(v["rows"][3]["offset"], 6);

    let v = parse(&run_machine(EXAMPLE2, 50));
    assert_eq!(v["kind"], "revtag");
    assert_eq!(v["status"], "cycle@12 period 2");
}

#[test]
fn pipeline_check_reports_all_stages() {
    let v = parse(&pipeline_check(EXAMPLE1_RIGHT, 100));
    assert_eq!(v["translation"]["passed"], true);
    assert_eq!(v["b_simulation"]["passed"], true);
    assert_eq!(v["b_simulation"]["halted"], true);
    assert_eq!(v["a_reduction"]["passed"], true);
    assert_eq!(v["a_reduction"]["calculable"], false);
    assert_eq!(v["pipeline"]["passed"], true);
    assert_eq!(v["pipeline"]["tag_status"], "halted@11");
    assert!(v["translated"].as_str().unwrap().starts_with("revtagsystem"));
}

#[test]
fn builtins_lists_all_five() {
    let v = parse(&builtins());
    let names: Vec<&str> =
        v.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["Q", "C", "V", "G", "golomb"]);
}

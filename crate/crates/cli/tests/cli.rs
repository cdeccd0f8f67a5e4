use std::io::Write as _;

use explogic::decide::{satisfiable, Budget, IntegerFormula, SatOutcome, Semantics};
use explogic::models::load_structure;
use explogic::syntax::parse_expectation;
use serde_json::Value;

const CREDAL: &str = r#"{"kind": "credal",
 "worlds": [{"id": "1", "props": []}, {"id": "2", "props": ["q2"]}, {"id": "3", "props": ["q3"]}],
 "measures": [{"1": "0", "2": "3/8", "3": "5/8"}, {"1": "5/8", "2": "0", "3": "3/8"}, {"1": "3/8", "2": "5/8", "3": "0"}]}"#;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("explogic").chain(args.iter().copied());
    let code = explogic_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp_file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn expect_lower_on_three_measures() {
    let s = temp_file(CREDAL);
    let path = s.path().to_str().unwrap();
    let (code, out, _) = run(&["expect", "--structure", path, "--gamble", "1 true + 1 q2 + 2 q3", "--mode", "lower"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "13/8");
    let (_, out, _) = run(&["expect", "--structure", path, "--gamble", "1 true + 1 q2 + 2 q3", "--mode", "upper"]);
    // max of 21/8, 14/8, 13/8
    assert_eq!(out.trim(), "21/8");
}

#[test]
fn sat_exit_codes() {
    let (code, out, _) = run(&["sat", "--semantics", "prob", "e(p) - e(true) > 0"]);
    assert_eq!((code, out.trim()), (1, "UNSAT"));
    let (code, out, _) = run(&["sat", "--semantics", "prob", "2 e(p) >= 1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("SAT\n"));
}

#[test]
fn translate_example() {
    let (code, out, _) = run(&["translate", "--semantics", "bel", "e(1 p + 1 q) >= 1"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "1 l(p|q) + 1 l(p&q) >= 1");
    let (code, _, err) = run(&["translate", "--semantics", "lp", "e(p) >= 0"]);
    assert_eq!(code, 2);
    assert!(err.contains("lp"));
}

#[test]
fn json_certificates_round_trip() {
    for sem in ["prob", "lp", "bel", "poss"] {
        let (code, out, _) = run(&["--format", "json", "sat", "--semantics", sem, "2 e(p) >= 1 & e(q) < 1"]);
        assert_eq!(code, 0, "{sem}");
        let doc: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["verdict"], "SAT");
        let cert = serde_json::to_string(&doc["certificate"]).unwrap();
        let s = load_structure(&cert).unwrap();
        // same certificate as the library call
        let f = IntegerFormula::new(parse_expectation("2 e(p) >= 1 & e(q) < 1").unwrap());
        let lib = satisfiable(&f, sem.parse::<Semantics>().unwrap(), &Budget::default()).unwrap();
        assert_eq!(lib.outcome, SatOutcome::Sat(s));
    }
}

#[test]
fn valid_and_countermodel() {
    let (code, out, _) = run(&["valid", "--semantics", "prob", "e(1 p + 1 q) = e(p) + e(q)"]);
    assert_eq!((code, out.trim()), (0, "VALID"));
    let (code, out, _) = run(&["--format", "json", "valid", "--semantics", "lp", "e(1 p + 1 q) = e(p) + e(q)"]);
    assert_eq!(code, 1);
    let doc: Value = serde_json::from_str(&out).unwrap();
    let m = load_structure(&doc["countermodel"].to_string()).unwrap();
    let f = explogic::syntax::Formula::Expectation(parse_expectation("e(1 p + 1 q) = e(p) + e(q)").unwrap());
    assert!(!explogic::checker::check(&m, &f).unwrap().verdict);
    let (code, _, _) = run(&["valid", "--semantics", "poss", "(e(p) >= e(q)) -> (e(p|q) = e(p))"]);
    assert_eq!(code, 0);
}

#[test]
fn check_prints_trace() {
    let s = temp_file(CREDAL);
    let path = s.path().to_str().unwrap();
    let (code, out, _) = run(&["check", "--structure", path, "--formula", "8 e(1 true + 1 q2 + 2 q3) >= 13"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("true"));
    assert!(out.contains("lhs = 13"));
    let (code, _, _) = run(&["check", "--structure", path, "--formula", "8 l(q2 | q3) >= 4"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["check", "--structure", path, "--formula", "q2 + q3 <= true"]);
    assert_eq!(code, 0);
}

#[test]
fn entail_reports_bounds() {
    let (code, out, _) = run(&["--format", "json", "entail", "--assume", "2 e(p) >= 1", "--target", "1 p|q"]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["bound"], "1/2");
    let (code, _, _) = run(&["entail", "--assume", "2 e(p) >= 1", "--target", "1 p|q", "--bound", "3/4"]);
    assert_eq!(code, 1);
    let (code, out, _) = run(&["entail", "--assume", "e(p) >= 2", "--target", "1 q"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("INCONSISTENT"));
}

#[test]
fn prove_check_files() {
    let good = temp_file(r#"{"system": "axprob", "lines": [{"formula": "e(true) = 1", "by": "E4"}]}"#);
    let (code, out, _) = run(&["prove-check", good.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    let bad = temp_file(r#"[{"formula": "e(1 p + 1 q) = e(p) + e(q)", "by": "E1"}]"#);
    let (code, out, _) = run(&["prove-check", "--system", "axlp", bad.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(out.trim(), "REJECTED line 1: E1 not in AX^lp");
}

#[test]
fn errors_exit_two() {
    let (code, _, err) = run(&["parse", "e(p"]);
    assert_eq!(code, 2);
    assert!(err.contains("column"));
    let (code, _, _) = run(&["sat", "--semantics", "prob", "--max-props", "1", "e(p) + e(q) >= 1"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["expect", "--structure", "/nonexistent.json", "--gamble", "1 p"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn parse_prints_canonical_text() {
    let (code, out, _) = run(&["parse", "e(p) < 1"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "!(1 e(1 p) >= 1)");
    let (code, out, _) = run(&["parse", "--lang", "prop", "p -> q"]);
    assert_eq!((code, out.trim()), (0, "p->q"));
}

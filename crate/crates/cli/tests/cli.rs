use std::process::{Command, Output};

fn tamari(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tamari"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    serde_json::from_str(&stdout(&tamari(&all))).expect("valid json")
}

#[test]
fn enum_balanced_matches() {
    let out = tamari(&["enum", "balanced", "--max-n", "12"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().skip(1).all(|l| l.ends_with("ok")));
}

#[test]
fn enum_intervals_and_narayana() {
    let v = json(&["enum", "balanced-intervals", "--max-n", "11"]);
    assert_eq!(v["match"], true);
    assert_eq!(v["rows"][11]["computed"], "231");
    let v = json(&["enum", "narayana", "--n", "7"]);
    let row: Vec<String> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["computed"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(row, ["1", "21", "105", "175", "105", "21", "1"]);
}

#[test]
fn enum_past_fixture_reports_no_verdict() {
    let v = json(&["enum", "weight-balanced", "--max-n", "23"]);
    assert_eq!(v["match"], true);
    assert_eq!(v["rows"][23]["expected"], serde_json::Value::Null);
}

#[test]
fn series_examples() {
    let out = tamari(&["series", "--builtin", "perf", "--degree", "8"]);
    assert_eq!(stdout(&out).trim(), "x + x^2 + x^4 + x^8");
    let out = tamari(&[
        "series", "--builtin", "mbi_xi", "--degree", "12", "--set", "y=0", "z=0", "t=0",
        "--coefficient", "12",
    ]);
    assert_eq!(stdout(&out).trim(), "xi + 13·xi^2 + 2·xi^3 + xi^4");
    let out = tamari(&["series", "--builtin", "bal", "--degree", "4"]);
    let text = stdout(&out);
    for term in ["4·x^2·y", "2·x^3", "4·x^2·y^2", "4·x^3·y", "x^4"] {
        assert!(text.contains(term), "{term} in {text}");
    }
}

#[test]
fn series_from_file_and_certificate() {
    let dir = std::env::temp_dir().join(format!("tamari-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("perf.txt");
    std::fs::write(&good, "buds: x\naxiom: x\nx -> [<x> <x>]\n").unwrap();
    let out = tamari(&["series", "--grammar", good.to_str().unwrap(), "--degree", "8"]);
    assert_eq!(stdout(&out).trim(), "x + x^2 + x^4 + x^8");
    let loop_grammar = dir.join("loop.txt");
    std::fs::write(&loop_grammar, "buds: x\naxiom: x\nx -> <x>\n").unwrap();
    let out = tamari(&["series", "--grammar", loop_grammar.to_str().unwrap(), "--degree", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "buds: x\nx -> [<x>\n").unwrap();
    let out = tamari(&["series", "--grammar", bad.to_str().unwrap(), "--degree", "4"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn check_closure() {
    let out = tamari(&["check", "closure-balanced", "--max-n", "9"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("PASS"));
    let out = tamari(&["--json", "check", "closure-vbalanced", "--v=-2..0", "--max-n", "8"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "FAIL");
    assert_eq!(v["n"], 7);
    assert_eq!(v["witness"][0], "((((..).).)(((..).).))");
}

#[test]
fn check_hypercube_histogram() {
    let v = json(&["check", "hypercube", "--max-n", "7"]);
    assert_eq!(v["verdict"], "PASS");
    for size in v["sizes"].as_array().unwrap() {
        let total: u64 = size["histogram"]
            .as_object()
            .unwrap()
            .values()
            .map(|c| c.as_u64().unwrap())
            .sum();
        assert_eq!(Some(total), size["intervals"].as_u64());
    }
    assert_eq!(v["sizes"][7]["intervals"], 52);
}

#[test]
fn check_intervals_and_experiment() {
    let v = json(&["check", "intervals", "--max-n", "8"]);
    assert_eq!(v["verdict"], "PASS");
    let v = json(&["check", "incomparable-vbalanced", "--v", "{0,1}", "--max-n", "9"]);
    assert_eq!(v["verdict"], "PASS");
    let v = json(&["check", "incomparable-vbalanced", "--v", "[-1,1]", "--max-n", "5"]);
    assert_eq!(v["verdict"], "FAIL");
}

#[test]
fn hasse_outputs() {
    let dot = stdout(&tamari(&["hasse", "tamari", "3"]));
    assert_eq!(dot.matches("label=").count(), 5);
    assert_eq!(dot.matches("->").count(), 5);
    let dot = stdout(&tamari(&["hasse", "interval", "(..)", "(..)"]));
    assert_eq!(dot.matches("label=").count(), 1);
    assert_eq!(dot.matches("->").count(), 0);
    let dot = stdout(&tamari(&["hasse", "balanced", "7"]));
    assert_eq!(dot.matches("label=").count(), 17);
    assert_eq!(dot.matches("->").count(), 24);
    assert_eq!(dot, stdout(&tamari(&["hasse", "balanced", "7"])));
}

#[test]
fn pattern_and_classify() {
    let v = json(&["pattern", "(.(.(..)))", "pmax", "[1 _ [0]]"]);
    assert_eq!(v["patterns"][0]["occurs"], false);
    assert_eq!(v["patterns"][1]["occurs"], true);
    let v = json(&["classify", "((..)(..))"]);
    assert_eq!(v["balanced"], true);
    assert_eq!(v["imbalances"], serde_json::json!([0, 0, 0]));
    let v = json(&["classify", "(.(.(..)))"]);
    assert_eq!(v["balanced"], false);
    assert_eq!(v["witness"], serde_json::json!([1, 1]));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(tamari(&["enum", "catalan"]).status.code(), Some(2));
    assert_eq!(tamari(&["enum", "narayana"]).status.code(), Some(2));
    assert_eq!(tamari(&["classify", "(.."]).status.code(), Some(2));
    assert_eq!(tamari(&["check", "closure-vbalanced"]).status.code(), Some(2));
    assert_eq!(tamari(&["check", "closure-vbalanced", "--v", "[1,2]"]).status.code(), Some(2));
    assert_eq!(tamari(&["frobnicate"]).status.code(), Some(2));
}

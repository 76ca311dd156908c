//! End-to-end runs of the `coordsolve` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coordsolve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = bin(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str], code: i32) -> String {
    let out = bin(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    assert!(out.stdout.is_empty(), "{args:?} printed partial output");
    String::from_utf8(out.stderr).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn tmp(name: &str, content: &str) -> String {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, content).unwrap();
    format!("@{}", p.display())
}

#[test]
fn ect_in_every_format() {
    assert_eq!(ok(&["ect", "--game", "CM(6)", "--protocol", "wm"]), "8/3\n");
    assert_eq!(ok(&["ect", "--game", "CM(6)", "--decimal", "5"]), "2.66666\n");
    assert_eq!(ok(&["ect", "--game", "CM(5)", "--protocol", "la", "--verify"]), "7/3\n");
    assert_eq!(ok(&["ect", "--game", "O(3)", "--protocol", "uniform"]), "3/2\n");
    let j = json(&["ect", "--game", "CM(7)", "--format", "json"]);
    assert_eq!(j["ect"], "19/7");
    assert_eq!(j["protocol"], "WM");
    let csv = ok(&["ect", "--game", "CM(4)", "--format", "csv", "--verify"]);
    assert!(csv.starts_with("game,history,protocol,ect,chain_size\n"));
    assert!(csv.contains(",5/2,"), "{csv}");
    // TOUCHED(1) plays like WM on choice matching games
    assert_eq!(ok(&["ect", "--game", "CM(6)", "--protocol", "touched:1"]), "8/3\n");
}

#[test]
fn game_and_table_files() {
    let stage = tmp(
        "cm5_stage.json",
        r#"{"choices":[5,5],"winning":[[0,0],[1,1],[2,2],[3,3],[4,4]],"history":[[0,1]]}"#,
    );
    // two touched edges: WM needs exactly two more rounds
    assert_eq!(ok(&["ect", "--game", &stage, "--protocol", "wm"]), "2\n");
    // LA falls back to the three untouched edges
    assert_eq!(ok(&["oscp", "--game", &stage, "--protocol", "la"]), "1/3\n");
    let table = tmp(
        "cm2_table.json",
        r#"{"entries":{"initial":{"1":{"0":1},"2":{"0":"1"}}},"fallback":"wm"}"#,
    );
    assert_eq!(ok(&["ect", "--game", "CM(2)", "--protocol", &table]), "1\n");
    let j = json(&["classify", "--game", &stage, "--format", "json"]);
    assert_eq!(j["history"], "(a1,b2)");
    assert!(j["focal_points"].as_array().unwrap().is_empty());
    assert_eq!(j["classes"].as_array().unwrap().len(), 3);
    let csv = ok(&["classify", "--game", &stage, "--format", "csv"]);
    assert_eq!(csv.lines().count(), 11);
    let text = ok(&["classify", "--game", "CM(3)"]);
    assert!(text.contains("renamings: 12"), "{text}");
    assert!(text.contains("one-round solvable: no"));
    let bad = tmp("bad.json", r#"{"choices":[2],"winning":"#);
    assert!(fails(&["ect", "--game", &bad], 2).contains("invalid JSON"));
    fails(&["ect", "--game", "@/nonexistent/game.json"], 2);
}

#[test]
fn gct_and_oscp() {
    assert_eq!(ok(&["gct", "--game", "CM(7)", "--protocol", "la", "--verify"]), "4\n");
    assert_eq!(ok(&["gct", "--game", "CM(6)", "--protocol", "wm"]), "INFINITE\n");
    let j = json(&["gct", "--game", "CM(5)", "--format", "json"]);
    assert_eq!(j["gct"], "3");
    assert_eq!(j["witness"].as_str().unwrap().split(' ').count(), 2);
    assert_eq!(ok(&["oscp", "--game", "CM(5)", "--verify"]), "1/5\n");
    assert_eq!(ok(&["oscp", "--game", "1x2+2x1", "--decimal", "3"]), "0.444\n");
}

#[test]
fn simulation_is_reproducible() {
    let args = ["simulate", "--game", "CM(4)", "--protocol", "wm", "--trials", "20000", "--seed", "3"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    assert!(a.contains("generator: ChaCha8"));
    let mut det = args.to_vec();
    det.extend(["--deterministic", "--timestamp"]);
    assert_eq!(ok(&det), a);
    let mut stamped = args.to_vec();
    stamped.push("--timestamp");
    assert!(ok(&stamped).starts_with("# generated at unix time "));
    let j = json(&[
        "simulate", "--game", "CM(5)", "--protocol", "la", "--trials", "20000", "--seed", "3", "--format", "json",
        "--verify",
    ]);
    assert_eq!(j["max_observed"], 3);
    assert_eq!(j["truncated"], 0);
    let hist = ok(&[
        "simulate", "--game", "CM(6)", "--protocol", "uniform", "--trials", "500", "--max-rounds", "2",
        "--histogram", "--format", "csv",
    ]);
    let mut total = 0u64;
    for line in hist.lines().skip(1) {
        total += line.split(',').nth(1).unwrap().parse::<u64>().unwrap();
    }
    assert_eq!(total, 500);
    assert!(hist.contains(">2,"));
    fails(&["simulate", "--game", "CM(2)", "--trials", "0"], 2);
}

#[test]
fn tables_reproduce() {
    let s = ok(&["table", "summary", "--max-m", "9", "--verify"]);
    assert!(s.contains("ceil(m/2) = k+1"), "typo note missing");
    let rows: Vec<&str> = s.lines().skip(1).take(9).collect();
    let ects: Vec<&str> = rows.iter().map(|r| r.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(ects, ["1", "2", "5/3", "5/2", "7/3", "8/3", "19/7", "11/4", "25/9"]);
    let j = json(&["table", "summary", "--max-m", "5", "--format", "json"]);
    assert_eq!(j["rows"][4]["gct"], "3");
    assert_eq!(j["rows"][3]["gct"], "INFINITE");
    let csv = ok(&["table", "bounds", "--max-m", "6", "--format", "csv", "--verify", "--decimal", "10"]);
    assert!(csv.contains("3,1.9250531240,1x2+2x1"), "{csv}");
    assert!(csv.contains("5,2.3333333333,CM(5)"));
    let w = ok(&["table", "wm-vs-la", "--max-m", "7", "--verify", "--format", "csv"]);
    assert_eq!(w, "m,wm,la\n1,1,1\n3,7/3,5/3\n5,13/5,7/3\n7,19/7,3\n");
    fails(&["table", "summary", "--max-m", "10"], 1);
}

#[test]
fn census_counts() {
    let csv = ok(&["census", "--m", "5", "--format", "csv", "--verify"]);
    let mut counts = std::collections::BTreeMap::new();
    for line in csv.lines().skip(1).filter(|l| !l.starts_with('#')) {
        let w: usize = line.split(',').next().unwrap().parse().unwrap();
        *counts.entry(w).or_insert(0) += 1;
    }
    // the two hand-listed specials have 8 edges
    assert_eq!(counts.into_iter().collect::<Vec<_>>(), [(5, 3), (6, 6), (7, 9), (8, 12)]);
    let j = json(&["census", "--m", "3", "--format", "json"]);
    assert_eq!(j["rows"].as_array().unwrap().len(), 8);
    assert!(j["notes"][0].as_str().unwrap().contains("1x2+2x1"));
    fails(&["census", "--m", "4"], 2);
}

#[test]
fn formulas() {
    let t = ok(&["formula-e", "--p", "1", "--n", "4", "--e1", "2", "--e2", "3/2", "--verify"]);
    assert!(t.contains("minimizers: {1}"), "{t}");
    let j = json(&["formula-e", "--p", "1/2", "--n", "2", "--e1", "2", "--e2", "2", "--format", "json"]);
    assert_eq!(j["minimizers"], "[0,1]");
    assert_eq!(j["value"], "2");
    let sweep = ok(&["formula-e", "--n", "3", "--e1", "3/2", "--e2", "1", "--sweep", "4", "--format", "csv"]);
    assert_eq!(sweep.lines().count(), 6);
    assert!(sweep.starts_with("p,ect\n0,"));
    fails(&["formula-e", "--p", "2", "--n", "3", "--e1", "2", "--e2", "2"], 2);
    fails(&["formula-e", "--n", "3", "--e1", "x", "--e2", "2"], 2);
    let f = ok(&["fixed-point", "--verify", "--decimal", "12"]);
    assert!(f.contains("1.925053124063"), "{f}");
    assert!(f.contains("1.780776406404"));
}

#[test]
fn error_statuses() {
    fails(&["ect", "--game", "CM(6"], 2);
    fails(&["ect", "--game", "CM(3)", "--protocol", "sometimes"], 2);
    fails(&["frobnicate"], 2);
    fails(&["ect"], 2);
    // the chain cannot close within one class
    fails(&["ect", "--game", "CM(4)", "--max-classes", "1"], 1);
    // two-player analysis only
    fails(&["ect", "--game", "CMn(3,2)"], 1);
    let help = bin(&["--help"]);
    assert!(help.status.success());
    assert!(String::from_utf8(help.stdout).unwrap().contains("census"));
}

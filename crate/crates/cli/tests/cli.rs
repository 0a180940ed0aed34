use std::path::PathBuf;
use std::process::{Command, Output};

use pd_core::reasoner::aa_to_pd;
use pd_core::{parse_aa, parse_pd};
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_str().unwrap().to_string()
}

fn pd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pd")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn check_exit_codes() {
    let ok = pd(&["check", &fixture("chain.pd")]);
    assert_eq!(ok.status.code(), Some(0));
    let report = json(&ok);
    assert_eq!(report["satisfiable"], true);
    assert_eq!(report["rules"], 2);

    let bad = pd(&["check", &fixture("inconsistent.pd"), "--mode", "owa"]);
    assert_eq!(bad.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(report["status"], "not-rule-psat");
    assert!(report["residual"].as_f64().unwrap() > 0.0);

    let closed = pd(&["check", &fixture("closed_world_conflict.pd"), "--mode", "pcwa"]);
    assert_eq!(closed.status.code(), Some(0));

    let missing = pd(&["check", "/nonexistent/rules.pd"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).contains("/nonexistent/rules.pd"));
}

#[test]
fn usage_and_parse_errors_exit_one() {
    assert_eq!(pd(&[]).status.code(), Some(1));
    assert_eq!(pd(&["solve", &fixture("chain.pd"), "--mode", "sideways"]).status.code(), Some(1));
    assert_eq!(pd(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.pd");
    std::fs::write(&path, "a <- b : 0.5.\nc <- d : 1.5.\n").unwrap();
    let out = pd(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("bad.pd:2:"), "{}", stderr(&out));

    let out = pd(&["query", &fixture("chain.pd"), "--literal", "nowhere"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn query_reports_probability_and_bounds() {
    let report = json(&pd(&["query", &fixture("two_rules_same_head.pd"), "--literal", "s0", "--bounds"]));
    assert_eq!(report["literal"], "s0");
    assert_eq!(report["converged"], true);
    assert_eq!(report["mode"]["world"], "pcwa");
    let bounds = report["bounds"].as_array().unwrap();
    assert!((bounds[0].as_f64().unwrap() - 0.42).abs() < 1e-6);
    assert!((bounds[1].as_f64().unwrap() - 0.70).abs() < 1e-6);
    let p = report["probability"].as_f64().unwrap();
    assert!((0.42..=0.70).contains(&p));

    let out = pd(&["query", &fixture("closed_world.pd"), "--literal", "s0", "--out", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("literal,probability"));
    let value: f64 = lines.next().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(value.abs() < 1e-6);
}

#[test]
fn solve_document_shape() {
    let report = json(&pd(&["solve", &fixture("nixon.pd")]));
    for key in ["mode", "converged", "residual", "entropy_bits", "literals", "arguments", "attacks", "worlds"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    let worlds = report["worlds"].as_array().unwrap();
    let n = report["literals"].as_array().unwrap().len() / 2;
    assert_eq!(worlds.len(), 1 << n);
    let total: f64 = worlds.iter().map(|w| w["probability"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
    for a in report["arguments"].as_array().unwrap() {
        assert!(a["support"].as_array().unwrap().contains(&a["claim"]));
        assert!(["in", "out", "undec"].contains(&a["label"].as_str().unwrap()));
    }
    let args = report["arguments"].as_array().unwrap().len() as u64;
    for at in report["attacks"].as_array().unwrap() {
        assert!(at["attacker"].as_u64().unwrap() < args && at["attacked"].as_u64().unwrap() < args);
    }
}

#[test]
fn solve_without_a_model_exits_two() {
    let out = pd(&["solve", &fixture("inconsistent.pd")]);
    assert_eq!(out.status.code(), Some(2));
    let relaxed = json(&pd(&["solve", &fixture("inconsistent.pd"), "--relax"]));
    assert_eq!(relaxed["converged"], true);
}

#[test]
fn label_graphs() {
    let report = json(&pd(&["label", &fixture("chain3.aaf")]));
    let labels: Vec<&str> =
        report["arguments"].as_array().unwrap().iter().map(|a| a["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["in", "out", "in"]);
    assert_eq!(report["complete"], true);

    let cycle = pd(&["label", &fixture("three_cycle.aaf")]);
    assert_eq!(cycle.status.code(), Some(2));
    assert!(stderr(&cycle).contains("no consistent labelling under PD semantics"));

    // Closed world with maximum entropy puts c out with both attackers undec,
    // which does not verify as complete.
    let floating = pd(&["label", &fixture("floating.aaf")]);
    assert_eq!(floating.status.code(), Some(2));
    assert!(stderr(&floating).contains("not complete"));

    let csv = pd(&["label", &fixture("mutual.aaf"), "--out", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("argument,probability,label"));
    assert_eq!(text.lines().filter(|l| l.ends_with(",undec")).count(), 2);
}

#[test]
fn convert_matches_the_library_mapping() {
    let out = pd(&["convert", &fixture("stable.aaf")]);
    assert!(out.status.success());
    let converted = parse_pd(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let graph = parse_aa(&std::fs::read_to_string(fixture("stable.aaf")).unwrap()).unwrap();
    // Parsing numbers atoms by first appearance, so compare rules by name.
    let named = |fw: &pd_core::PDFramework| fw.rules.iter().map(|r| fw.display_rule(r)).collect::<Vec<_>>();
    assert_eq!(named(&converted), named(&aa_to_pd(&graph)));

    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("stable.pd");
    assert!(pd(&["convert", &fixture("stable.aaf"), "-o", target.to_str().unwrap()]).status.success());
    assert_eq!(parse_pd(&std::fs::read_to_string(&target).unwrap()).unwrap(), converted);
}

#[test]
fn dump_system_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("system.csv");
    let out = pd(&["solve", &fixture("chain.pd"), "--mode", "owa", "--dump-system", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tag,b,w0,w1,w2,w3");
    assert_eq!(lines.len(), 4);
    let last: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(&last[1..], ["1", "1", "1", "1", "1"]);
}

#[test]
fn bench_csv() {
    let out = pd(&["bench", "--literals", "3", "--rules", "4", "--reps", "3", "--backends", "sgd,lp,max-entropy"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("backend,n_literals,n_rules,seed,rep,wall_ms,converged,residual,entropy_bits"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert_eq!(r.len(), 9);
        assert_eq!(r[6], "true");
        let h: f64 = r[8].parse().unwrap();
        assert!((0.0..=3.0 + 1e-9).contains(&h));
    }

    let again = pd(&["bench", "--literals", "3", "--rules", "4", "--reps", "3", "--backends", "sgd,lp,max-entropy"]);
    let strip = |s: &str| -> Vec<String> {
        s.lines().map(|l| l.split(',').enumerate().filter(|(i, _)| *i != 5).map(|(_, f)| f).collect::<Vec<_>>().join(",")).collect()
    };
    assert_eq!(strip(&text), strip(&String::from_utf8(again.stdout).unwrap()));

    let bad = pd(&["bench", "--backends", "quantum"]);
    assert_eq!(bad.status.code(), Some(1));
}

use std::process::{Command, Output};

fn triquad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triquad"))
        .args(args)
        .env_remove("TRIQUAD_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).expect("stderr is JSON")
}

#[test]
fn analyze_reports_index() {
    let o = triquad(&["analyze", "--p1", "41", "--p2", "29", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["qK"], 32);
    assert_eq!(v["pair"], serde_json::json!([41, 29]));
    assert_eq!(v["generators"].as_array().unwrap().len(), 7);
}

#[test]
fn bad_pairs_exit_two() {
    for (a, b) in [("41", "41"), ("7", "13"), ("41", "45")] {
        let o = triquad(&["analyze", "--p1", a, "--p2", b]);
        assert_eq!(o.status.code(), Some(2), "({a},{b})");
        let e = error_json(&o);
        assert_eq!(e["error"], "precondition");
        assert_eq!(e["exit_code"], 2);
        assert!(e["message"].as_str().unwrap().contains(a));
    }
}

#[test]
fn usage_errors_are_json() {
    let o = triquad(&["scan"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "usage");
    let o = triquad(&["scan", "--max", "11"]);
    assert_eq!(o.status.code(), Some(2));
    let o = triquad(&["scan", "--max", "40", "--sig", "1,1,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_csv_layout() {
    let o = triquad(&["scan", "--max", "13", "--format", "csv"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "p1,p2,p1mod8,p2mod8,n1,n2,n3,n4,case,qK,h2K,qL,h2L,resolved_by_search");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("5,13,5,5,"));

    let out = stdout(&triquad(&["scan", "--max", "100", "--format", "csv"]));
    assert!(out.lines().any(|l| l.starts_with("41,73,1,1,-1,1,1,1,MT3.7,32,")), "{out}");
    let pairs: Vec<(u64, u64)> = out
        .lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split(',').map(|x| x.parse::<u64>().unwrap_or(0));
            (f.next().unwrap(), f.next().unwrap())
        })
        .collect();
    let mut sorted = pairs.clone();
    sorted.sort();
    assert_eq!(pairs, sorted);
}

#[test]
fn scan_filters() {
    let all = stdout(&triquad(&["scan", "--max", "60", "--format", "csv"]));
    let sub = stdout(&triquad(&["scan", "--max", "60", "--sig", "-1,-1,-1,-1", "--format", "csv"]));
    let expect: Vec<&str> = all.lines().skip(1).filter(|l| l.split(',').skip(4).take(4).all(|n| n == "-1")).collect();
    let got: Vec<&str> = sub.lines().skip(1).collect();
    assert!(!got.is_empty());
    assert_eq!(got, expect);

    let m = stdout(&triquad(&["scan", "--max", "60", "--mod8", "1,5", "--format", "csv"]));
    assert!(m.lines().skip(1).all(|l| l.split(',').nth(2) == Some("1") && l.split(',').nth(3) == Some("5")));
}

#[test]
fn json_output_is_deterministic() {
    let a = triquad(&["analyze", "--p1", "89", "--p2", "73"]);
    let b = triquad(&["analyze", "--p1", "89", "--p2", "73", "--jobs", "2"]);
    assert_eq!(a.stdout, b.stdout);
    let a = triquad(&["scan", "--max", "80"]);
    let b = triquad(&["scan", "--max", "80", "--jobs", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("units.jsonl");
    let p = path.to_str().unwrap();
    let cold = triquad(&["--cache", p, "scan", "--max", "70", "--format", "csv"]);
    assert!(cold.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with(r#"{"format":"triquad-units","version":1}"#));
    assert!(text.lines().count() > 10);
    let warm = Command::new(env!("CARGO_BIN_EXE_triquad"))
        .args(["scan", "--max", "70", "--format", "csv"])
        .env("TRIQUAD_CACHE", p)
        .output()
        .unwrap();
    assert!(warm.status.success());
    assert_eq!(cold.stdout, warm.stdout);
}

#[test]
fn corrupt_cache_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("units.jsonl");
    std::fs::write(&path, "{\"format\":\"triquad-units\",\"version\":1}\n{\"d\":\"34\",\"a\":\"35\",\"b\":\"7\",\"denom\":\"1\",\"norm\":\"1\"}\n").unwrap();
    let o = triquad(&["--cache", path.to_str().unwrap(), "analyze", "--p1", "17", "--p2", "13"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_json(&o)["error"], "cache");
}

#[test]
fn verify_suites_pass() {
    for args in [vec!["verify", "table1"], vec!["verify", "sweep", "--bound", "300"], vec!["verify", "index", "--bound", "60"]] {
        let o = triquad(&args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["pass"], true);
        assert_eq!(v["violations"], 0);
        assert!(v["tested"].as_u64().unwrap() >= 10);
    }
}

#[test]
fn verify_writes_requested_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t1.json");
    let o = triquad(&["verify", "table1", "--report", path.to_str().unwrap()]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 10);
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphheat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const P3: &str = "graph 3\nv 0 1 0\nv 1 1 0\nv 2 1 0\ne 0 1 1\ne 1 2 1\n";

/// Parses the rows of a CSV body into maps keyed by header name.
fn rows(csv: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| header.iter().map(|h| h.to_string()).zip(l.split(',').map(str::to_string)).collect())
        .collect()
}

#[test]
fn distance_on_p3_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "p3.txt", P3);
    let o = run(&["distance", "--input", &file]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "x,y,d_E,d_L,status\n0,1,1,1,ok\n0,2,2,2,ok\n1,2,1,1,ok\n");
}

#[test]
fn distance_across_components() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "two.txt", "graph 4\nv 0 1 0\nv 1 1 0\nv 2 1 0\nv 3 1 0\ne 0 1 1\ne 2 3 1\n");
    let o = run(&["distance", "--input", &file, "--cutoff", "10", "--pairs", "0,3;0,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x,y,d_E,d_L,status\n0,1,1,1,ok\n0,3,INF,INF,ok\n");
}

#[test]
fn malformed_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "bad.txt", "graph 2\nv 0 1 0\nv 1 1 0\ne 0 1 -1\n");
    let o = run(&["distance", "--input", &file]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["distance"]).status.code(), Some(2));
    assert_eq!(run(&["distance", "--gen", "grid:3"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--gen", "path:3", "--count", "2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--gen", "path:3", "--ratio", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["heat", "--gen", "path:3", "--method", "fast"]).status.code(), Some(2));
    assert_eq!(run(&["heat", "--gen", "path:3", "--pairs", "0,7"]).status.code(), Some(2));
    let o = run(&["distance", "--gen", "path:5", "--pairs", "sample:3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--seed"));
}

#[test]
fn verify_p2_all_pass() {
    let o = run(&["verify", "--gen", "path:2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rs = rows(&stdout(&o));
    assert_eq!(rs.len(), 16);
    assert!(rs.iter().all(|r| r["passed"] == "true"));
    let which: std::collections::BTreeSet<_> = rs.iter().map(|r| r["which"].clone()).collect();
    assert_eq!(which.len(), 4);
    assert!(stderr(&o).contains("16/16 passed"));
}

#[test]
fn verify_random_graph() {
    let o = run(&["verify", "--gen", "random:15:0.3:42"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(rows(&stdout(&o)).iter().all(|r| r["passed"] == "true"));
}

#[test]
fn verify_disconnected_pairs() {
    let o = run(&["verify", "--gen", "random:8:0.1:3", "--pairs", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rs = rows(&stdout(&o));
    assert!(rs.iter().any(|r| r["d"] == "INF"));
}

#[test]
fn verify_empty_selection() {
    let o = run(&["verify", "--gen", "path:3", "--pairs", ""]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "which,x,y,d,t,n,lhs,rhs,margin,passed\n");
}

fn slope(args: &[&str]) -> f64 {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    rows(&stdout(&o))[0]["slope"].parse().unwrap()
}

#[test]
fn exponent_examples() {
    assert!((slope(&["exponent", "--gen", "path:2"]) - 1.0).abs() < 1e-3);
    assert!((slope(&["exponent", "--gen", "path:3", "--pairs", "0,2"]) - 2.0).abs() < 1e-2);
    let heat = slope(&["exponent", "--gen", "path:3", "--pairs", "0,2"]);
    let wave = slope(&["exponent", "--gen", "path:3", "--pairs", "0,2", "--group", "wave"]);
    assert!((heat - wave).abs() <= 0.05);
    assert!((slope(&["exponent", "--gen", "path:6", "--pairs", "0,5"]) - 5.0).abs() <= 0.05);
}

#[test]
fn exponent_tolerance_failure_exits_one() {
    let o = run(&["exponent", "--gen", "path:3", "--pairs", "0,2", "--t0", "0.1", "--tol", "1e-6"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(rows(&stdout(&o)).len(), 1);
}

#[test]
fn heat_sweep_closed_form() {
    let o = run(&["heat", "--gen", "path:2", "--pairs", "0,1", "--t0", "0.25", "--ratio", "0.1", "--count", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rs = rows(&stdout(&o));
    assert_eq!(rs.len(), 8);
    assert_eq!(rs[0]["t"], "0e0");
    assert_eq!(rs[0]["value"], "0e0");
    for r in &rs[1..] {
        let t: f64 = r["t"].parse().unwrap();
        let value: f64 = r["value"].parse().unwrap();
        let exact = -(-2.0 * t).exp_m1() / 2.0;
        assert!((value - exact).abs() <= 1e-12 * exact, "t = {t}");
        let leading: f64 = r["leading"].parse().unwrap();
        assert_eq!(leading, t);
        let bound: f64 = r["bound"].parse().unwrap();
        assert!((value - leading).abs() <= bound);
    }
    let ts: Vec<f64> = rs.iter().map(|r| r["t"].parse().unwrap()).collect();
    assert!(ts.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn heat_sweep_diagonal_start() {
    let o = run(&["heat", "--gen", "random:5:0.6:2", "--pairs", "3,3"]);
    let rs = rows(&stdout(&o));
    assert_eq!(rs[0]["t"], "0e0");
    assert_eq!(rs[0]["d"], "0");
    assert_eq!(rs[0]["value"], rs[0]["leading"]);
}

#[test]
fn wave_sweep_columns() {
    let o = run(&["wave", "--gen", "path:2", "--pairs", "0,1", "--method", "eigen", "--t0", "0.5", "--count", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let rs = rows(&stdout(&o));
    assert_eq!(rs.len(), 4);
    for r in &rs[1..] {
        let t: f64 = r["t"].parse().unwrap();
        let re: f64 = r["re"].parse().unwrap();
        let im: f64 = r["im"].parse().unwrap();
        let (er, ei) = (t.sin().powi(2), (2.0 * t).sin() / 2.0);
        assert!((re - er).hypot(im - ei) <= 1e-12 * er.hypot(ei), "t = {t}");
        assert_eq!(r["method"], "eigen");
    }
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = run(&["verify", "--gen", "random:12:0.3:9", "--pairs", "sample:10", "--seed", "4", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
    let (a, b) = (fs::read(a).unwrap(), fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

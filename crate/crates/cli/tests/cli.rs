use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn graph(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn eqf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqf")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const TRIANGLE: &str = "n 3\ne 0 1\ne 1 2\ne 2 0\n";

#[test]
fn check_reports_obstruction() {
    let g = graph(TRIANGLE);
    let o = eqf(&["check", g.path().to_str().unwrap(), "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("certificate z [0, 1, 2] m 1 checksum 0"));
}

#[test]
fn factorize_equitable_text_and_json() {
    let g = graph("n 2\ne 0 1\ne 0 1\ne 0 1\ne 0 1\ne 0 1\ne 0 1\n");
    let p = g.path().to_str().unwrap();
    let o = eqf(&["factorize", p, "--k", "3", "--mode", "equitable"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("factor ")).count(), 6);
    assert!(text.contains("summary 2 2") && text.contains("verified true"));
    let o = eqf(&["--format", "json", "factorize", p, "--k", "3", "--mode", "equitable"]);
    let j: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["sizes"], serde_json::json!([2, 2, 2]));
    assert_eq!(j["report"]["pass"], true);
}

#[test]
fn almost_needs_assumption_on_triangle() {
    let g = graph(TRIANGLE);
    let p = g.path().to_str().unwrap();
    let o = eqf(&["factorize", p, "--k", "2", "--mode", "almost", "--s", "2,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = eqf(&["factorize", p, "--k", "2", "--mode", "almost", "--s", "2,0,0", "--assume-preconditions"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified true"));
}

#[test]
fn two_bound_modes_on_k4() {
    let g = graph("n 4\ne 0 1\ne 0 2\ne 0 3\ne 1 2\ne 1 3\ne 2 3\n");
    let p = g.path().to_str().unwrap();
    for mode in ["min", "max"] {
        let o = eqf(&["factorize", p, "--mode", mode, "--bounds", "1,2"]);
        assert_eq!(o.status.code(), Some(0), "{mode}");
        assert!(stdout(&o).contains("verified true"));
    }
}

#[test]
fn table_matches_known_rows() {
    let o = eqf(&["table", "--k", "3"]);
    assert_eq!(stdout(&o), "3 1\n3 2\n");
    let o = eqf(&["table", "--k", "4"]);
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn orient_and_exit_codes() {
    let g = graph("n 4\ne 0 1\ne 0 2\ne 0 3\ne 1 2\ne 1 3\ne 2 3\n");
    let p = g.path().to_str().unwrap();
    let o = eqf(&["orient", p, "--k", "3", "--targets", "0,0,0,0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = eqf(&["orient", p, "--k", "3", "--targets", "0,0,0"]);
    assert_eq!(o.status.code(), Some(4));
    let c4 = graph("n 4\ne 0 1\ne 1 2\ne 2 3\ne 3 0\n");
    let o = eqf(&["orient", c4.path().to_str().unwrap(), "--k", "2", "--targets", "1,1,1,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
    assert_eq!(eqf(&["check", "/no/such/file", "--k", "2"]).status.code(), Some(4));
}

#[test]
fn verify_round_trip() {
    let g = graph(TRIANGLE);
    let p = g.path().to_str().unwrap();
    let asg = graph("factor 0 0\nfactor 1 0\nfactor 2 0\n");
    let claims = graph(r#"{"k": 2, "equitable": true}"#);
    let o = eqf(&["verify", p, "--assignment", asg.path().to_str().unwrap(), "--claims", claims.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("claim equitable fail vertex 0"));
}

#[test]
fn oracle_and_search() {
    let g = graph("n 3\ne 0 1\ne 1 2\n");
    let p = g.path().to_str().unwrap();
    let o = eqf(&["oracle", p, "--problem", "gf-parity", "--v0", "0,1,2", "--lo", "1,1,1", "--hi", "1,1,1"]);
    assert_eq!(o.status.code(), Some(1));
    let a = eqf(&["--format", "json", "search", "--seed", "7", "--trials", "20", "--conjecture", "tree-connected"]);
    let b = eqf(&["--format", "json", "search", "--seed", "7", "--trials", "20", "--conjecture", "tree-connected"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
    let bad = eqf(&["search", "--seed", "0", "--trials", "0", "--conjecture", "tree-connected"]);
    assert_eq!(bad.status.code(), Some(4));
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const WEIGHTED: &str = "p cnf 2 1\nc p weight 1 2 0\nc p weight -1 1 0\nc p weight 2 3 0\nc p weight -2 5 0\n1 2 0\n";

fn wmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wmc")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn weighted_example_on_every_path() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "w.cnf", WEIGHTED);
    for algo in ["auto", "alg2", "alg3", "brute", "primal-pw", "dual-pw"] {
        let o = wmc(&["count", s(&f), "--algo", algo]);
        assert!(o.status.success(), "{algo}");
        assert_eq!(stdout(&o).trim(), "19", "{algo}");
    }
}

#[test]
fn generated_instances_agree() {
    let dir = TempDir::new().unwrap();
    for (width, seed) in [(2, 3), (3, 4)] {
        let w = width.to_string();
        let seed = seed.to_string();
        let g = wmc(&["gen", "--vars", "16", "--clauses", "20", "--width", &w, "--seed", &seed, "--max-weight", "6"]);
        assert!(g.status.success());
        let f = file(&dir, "g.cnf", &stdout(&g));
        let brute = stdout(&wmc(&["count", s(&f), "--algo", "brute"]));
        assert_eq!(stdout(&wmc(&["count", s(&f)])), brute);
        assert_eq!(stdout(&wmc(&["count", s(&f), "--brute-cap", "0", "--paranoid"])), brute);
    }
}

#[test]
fn gen_is_deterministic() {
    let args = ["gen", "--vars", "10", "--clauses", "15", "--width", "3", "--seed", "9"];
    let a = wmc(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&wmc(&args)));
    assert!(stdout(&a).starts_with("p cnf 10 15"));
    assert_eq!(wmc(&["gen", "--vars", "2", "--clauses", "1", "--width", "3", "--seed", "0"]).status.code(), Some(1));
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let wide = file(&dir, "wide.cnf", "p cnf 4 1\n1 2 3 4 0\n");
    let o = wmc(&["count", s(&wide)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("length 4"));

    let bad = file(&dir, "bad.cnf", "p cnf 2 1\n1 5 0\n");
    let o = wmc(&["count", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    assert_eq!(wmc(&["count", "/nonexistent.cnf"]).status.code(), Some(1));
    assert_eq!(wmc(&["count"]).status.code(), Some(1));
    assert_eq!(wmc(&["--help"]).status.code(), Some(0));
}

#[test]
fn stats_json() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "w.cnf", WEIGHTED);
    let out = dir.path().join("stats.json");
    assert!(wmc(&["count", s(&f), "--stats-json", s(&out)]).status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["count"], "19");
    assert_eq!(v["weighted"], true);
    assert_eq!(v["algorithm"], "alg2");
    assert!(v["nodes"].as_u64().unwrap() >= 1);
    assert!(v.get("bound_ratio").is_none());

    let g = wmc(&["gen", "--vars", "30", "--clauses", "70", "--width", "3", "--seed", "1"]);
    let f = file(&dir, "g.cnf", &stdout(&g));
    assert!(wmc(&["count", s(&f), "--stats-json", s(&out)]).status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["weighted"], false);
    assert!(v["branches"].as_u64().unwrap() > 0);
    assert!(v["bound_ratio"]["exponent"].is_f64());
}

#[test]
fn check_reports_structure_and_decompositions() {
    let dir = TempDir::new().unwrap();
    let f = file(&dir, "p.cnf", "p cnf 3 2\n1 2 0\n2 3 0\n");
    let o = wmc(&["check", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("input: n=3 m=2"));

    let good = file(&dir, "good.pd", "1 2\n2 3\n");
    let bad = file(&dir, "bad.pd", "1 2\n3\n");
    let dot = dir.path().join("g.dot");
    let o = wmc(&["check", s(&f), "--decomp", s(&good), "--dot", s(&dot)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("valid, width 1"));
    assert!(fs::read_to_string(&dot).unwrap().contains("graph"));

    let o = wmc(&["check", s(&f), "--decomp", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("invalid"));

    let dual_ok = file(&dir, "dual.pd", "0 1\n");
    assert_eq!(wmc(&["check", s(&f), "--graph", "dual", "--decomp", s(&dual_ok)]).status.code(), Some(0));
}

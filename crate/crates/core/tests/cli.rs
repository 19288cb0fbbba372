use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_evenfactor"));
    c.env_remove("EVENFACTOR_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn solve_writes_a_certificate_that_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "tri.dg", "3 6\n0 1\n1 0\n1 2\n2 1\n2 0\n0 2\n");
    let cert = dir.path().join("tri.cert");
    let cert = cert.to_str().unwrap();
    for algo in ["fast", "pap"] {
        let o = run(&["solve", "--input", &input, "--algo", algo, "--certificate", cert]);
        assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
        assert!(text(&o.stdout).contains("size 2"));
        let v = run(&["verify", "--input", &input, "--certificate", cert]);
        assert_eq!(v.status.code(), Some(0), "{}", text(&v.stderr));
    }
}

#[test]
fn verify_rejects_an_odd_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "tri.dg", "3 6\n0 1\n1 0\n1 2\n2 1\n2 0\n0 2\n");
    let cert = write(dir.path(), "bad.cert", "size 3\n0 1\n1 2\n2 0\n");
    let o = run(&["verify", "--input", &input, "--certificate", &cert]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn asymmetric_input_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "cyc.dg", "3 3\n0 1\n1 2\n2 0\n");
    assert_eq!(run(&["check", "--input", &input]).status.code(), Some(3));
    assert_eq!(run(&["solve", "--input", &input]).status.code(), Some(3));
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "junk.dg", "3 2\n0 1\n");
    assert_eq!(run(&["solve", "--input", &input]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--input", "/nonexistent/x.dg"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--bogus"]).status.code(), Some(2));
}

#[test]
fn trace_goes_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "tri.dg", "3 6\n0 1\n1 0\n1 2\n2 1\n2 0\n0 2\n");
    let o = run(&["solve", "--input", &input, "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(text(&o.stderr).contains("breakthrough"));
}

#[test]
fn dot_export_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.dg", "2 2\n0 1\n1 0\n");
    let dot = dir.path().join("g.dot");
    let o = run(&["solve", "--input", &input, "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(dot).unwrap().starts_with("digraph"));
}

#[test]
fn gen_is_reproducible_from_env_seed() {
    let a = run(&["gen", "--family", "mixed-symmetric", "--n", "15", "--seed", "9"]);
    let b = bin()
        .args(["gen", "--family", "mixed-symmetric", "--n", "15"])
        .env("EVENFACTOR_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn gen_fills_the_corpus_layout() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_str().unwrap();
    let o = run(&[
        "gen", "--family", "bipartite-digraph", "--n", "10", "--seed", "4", "--count", "2", "--corpus", root,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    for seed in [4, 5] {
        let p = dir.path().join("bipartite-digraph").join(format!("{seed}.dg"));
        let c = run(&["check", "--input", p.to_str().unwrap()]);
        assert_eq!(c.status.code(), Some(0));
    }
}

#[test]
fn bench_prints_csv() {
    let o = run(&["bench", "--family", "symmetrized-undirected", "--sizes", "10,20", "--seeds", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let out = text(&o.stdout);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("n,m,seed,algo"));
    assert_eq!(lines.count(), 8);
}

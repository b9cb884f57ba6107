use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn lunes(dir: &Path, args: &[&str]) -> Output {
    lunes_env(dir, args, &[])
}

fn lunes_env(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lunes"));
    cmd.current_dir(dir).args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("LUNES_")) {
        cmd.env_remove(k);
    }
    cmd.envs(env.iter().copied());
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn assert_ok(o: &Output) {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
}

/// Sorted (name, bytes) of every file in a directory.
fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn traces(dir: &Path) -> Vec<PathBuf> {
    let mut t: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "trace"))
        .collect();
    t.sort();
    t
}

fn protocol_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| matches!(l.chars().next(), Some('G' | 'R' | 'D')))
        .map(String::from)
        .collect()
}

fn small_corpus(dir: &Path, name: &str, count: &str) -> String {
    let out = format!("corpora/{name}");
    assert_ok(&lunes(
        dir,
        &["gen", "--model", "er", "--nodes", "40", "--edges", "80", "--count", count, "--seed", "3", "--out", &out],
    ));
    out
}

#[test]
fn gen_writes_corpus_and_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let args = [
        "gen",
        "--model",
        "er",
        "--nodes",
        "200",
        "--edges",
        "400",
        "--count",
        "10",
        "--seed",
        "42",
        "--out",
        "corpora/s1",
    ];
    assert_ok(&lunes(tmp.path(), &args));
    let dir = tmp.path().join("corpora/s1");
    let first = snapshot(&dir);
    let dots = first.iter().filter(|(n, _)| n.ends_with(".dot")).count();
    assert_eq!(dots, 10);
    assert!(first.iter().any(|(n, _)| n == "manifest"));
    assert_ok(&lunes(tmp.path(), &args));
    assert_eq!(snapshot(&dir), first);
}

#[test]
fn gen_rejects_impossible_edge_count() {
    let tmp = TempDir::new().unwrap();
    let o = lunes(tmp.path(), &["gen", "--model", "er", "--nodes", "3", "--edges", "99", "--out", "c"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("99") && err.contains('3'), "{err}");
    assert!(!tmp.path().join("c").exists());
}

#[test]
fn gen_ba_and_dot_import() {
    let tmp = TempDir::new().unwrap();
    assert_ok(&lunes(
        tmp.path(),
        &["gen", "--model", "ba", "--nodes", "30", "--m0", "3", "--m-attach", "2", "--count", "2", "--out", "ba"],
    ));
    let files = format!("{0}/ba/graph_000.dot,{0}/ba/graph_001.dot", tmp.path().display());
    assert_ok(&lunes(tmp.path(), &["gen", "--model", "dot", "--input", &files, "--out", "imported"]));
    let manifest = fs::read_to_string(tmp.path().join("imported/manifest")).unwrap();
    assert!(manifest.contains("model=dot"));
    assert_eq!(code(&lunes(tmp.path(), &["gen", "--model", "dot", "--out", "x"])), 2);
}

#[test]
fn sim_header_and_partition_invariance() {
    let tmp = TempDir::new().unwrap();
    let corpus = small_corpus(tmp.path(), "small", "2");
    let base = [
        "sim",
        "--corpus",
        &corpus,
        "--protocol",
        "fixed",
        "--prob",
        "0.8",
        "--ttl",
        "auto",
        "--steps",
        "150",
        "--seed",
        "7",
    ];
    let mut one: Vec<&str> = base.to_vec();
    one.extend(["--lp", "1", "--gaia", "off", "--out", "runs/one"]);
    assert_ok(&lunes(tmp.path(), &one));
    let mut four: Vec<&str> = base.to_vec();
    four.extend(["--lp", "4", "--gaia", "on", "--out", "runs/four"]);
    assert_ok(&lunes(tmp.path(), &four));

    let a = traces(&tmp.path().join("runs/one"));
    let b = traces(&tmp.path().join("runs/four"));
    assert_eq!(a.len(), 2);
    let text = fs::read_to_string(&a[0]).unwrap();
    // ceil(ln 40 / ln 2) = 6
    assert!(text.lines().any(|l| l == "# ttl=6"), "{}", &text[..300]);
    assert!(text.lines().any(|l| l == "# format_version=1"));
    assert!(text.lines().any(|l| l == "# lp=1"));
    for (x, y) in a.iter().zip(&b) {
        let lines = protocol_lines(x);
        assert!(!lines.is_empty());
        assert_eq!(lines, protocol_lines(y));
    }
}

#[test]
fn sim_rejects_bad_parameters() {
    let tmp = TempDir::new().unwrap();
    let corpus = small_corpus(tmp.path(), "small", "1");
    assert_eq!(code(&lunes(tmp.path(), &["sim", "--corpus", &corpus, "--protocol", "nosuch"])), 2);
    assert_eq!(code(&lunes(tmp.path(), &["sim", "--corpus", &corpus, "--prob", "1.5"])), 2);
    assert_eq!(code(&lunes(tmp.path(), &["sim", "--corpus", &corpus, "--bogus", "1"])), 2);
    assert_eq!(code(&lunes(tmp.path(), &["sim", "--corpus", "does/not/exist"])), 1);
}

#[test]
fn analyze_messages_match_receive_lines() {
    let tmp = TempDir::new().unwrap();
    let corpus = small_corpus(tmp.path(), "small", "2");
    assert_ok(&lunes(tmp.path(), &["sim", "--corpus", &corpus, "--steps", "120", "--out", "runs"]));
    let files = traces(&tmp.path().join("runs"));
    let list: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    let o = lunes(tmp.path(), &["analyze", "--report", "messages", "--trace", &list.join(",")]);
    assert_ok(&o);
    let report = stdout(&o);
    let r_lines: usize = files.iter().map(|f| protocol_lines(f).iter().filter(|l| l.starts_with('R')).count()).sum();
    assert!(report.lines().any(|l| l == format!("total_delivered={r_lines}")), "{report}");
    for f in &files {
        let own = protocol_lines(f).iter().filter(|l| l.starts_with('R')).count();
        let stem = f.file_stem().unwrap().to_string_lossy();
        let row = report.lines().find(|l| l.starts_with(&*stem)).unwrap();
        assert_eq!(row.split(',').nth(2).unwrap(), own.to_string());
    }
}

#[test]
fn analyze_coverage_of_flooding_is_complete() {
    let tmp = TempDir::new().unwrap();
    let ring: String = (0..12).map(|i| format!("{i} -- {};\n", (i + 1) % 12)).collect();
    fs::write(tmp.path().join("ring.dot"), format!("graph G {{\n{ring}}}\n")).unwrap();
    assert_ok(&lunes(tmp.path(), &["gen", "--model", "dot", "--input", "ring.dot", "--out", "ring"]));
    // diameter 6; messages generated in the last 6 steps cannot finish
    assert_ok(&lunes(
        tmp.path(),
        &["sim", "--corpus", "ring", "--protocol", "broadcast", "--ttl", "6", "--steps", "60", "--out", "runs"],
    ));
    let trace = traces(&tmp.path().join("runs"))[0].display().to_string();
    let o = lunes(tmp.path(), &["analyze", "--report", "coverage", "--trace", &trace]);
    assert_ok(&o);
    let row = stdout(&o).lines().last().unwrap().to_string();
    assert_eq!(row.rsplit(',').next().unwrap(), "1.000000", "{row}");

    let lines = fs::read_to_string(&trace).unwrap();
    let late: Vec<&str> = lines
        .lines()
        .filter(|l| l.starts_with('G'))
        .filter(|l| l.split(' ').nth(1).unwrap().parse::<u32>().unwrap() >= 54)
        .collect();
    let messages: usize = row.split(',').nth(1).unwrap().parse().unwrap();
    let mean: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    // every message from before the tail reaches all 11 other nodes
    assert!(mean * messages as f64 >= (messages - late.len()) as f64 - 1e-5 * messages as f64, "{row}");
}

#[test]
fn analyze_speedup_needs_baseline() {
    let tmp = TempDir::new().unwrap();
    let corpus = small_corpus(tmp.path(), "small", "1");
    assert_ok(&lunes(tmp.path(), &["sim", "--corpus", &corpus, "--steps", "50", "--lp", "2", "--out", "a"]));
    assert_ok(&lunes(tmp.path(), &["sim", "--corpus", &corpus, "--steps", "50", "--lp", "4", "--out", "b"]));
    let o = lunes(tmp.path(), &["analyze", "--report", "speedup", "--stats", "a/graph_000.stats,b/graph_000.stats"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&lunes(tmp.path(), &["analyze", "--report", "speedup"])), 2);
    assert_eq!(code(&lunes(tmp.path(), &["analyze", "--report", "nosuch", "--trace", "x"])), 2);
}

#[test]
fn analyze_rejects_corrupt_trace() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("bad.trace"), "# format_version=1\n# n=4\n# ttl=3\nR 0 1 0:0 1\n").unwrap();
    assert_eq!(code(&lunes(tmp.path(), &["analyze", "--trace", "bad.trace"])), 3);
    fs::write(tmp.path().join("garbled.trace"), "# format_version=1\nQ 0 1\n").unwrap();
    assert_eq!(code(&lunes(tmp.path(), &["analyze", "--trace", "garbled.trace"])), 2);
}

#[test]
fn bench_runs_five_configurations() {
    let tmp = TempDir::new().unwrap();
    let corpus = small_corpus(tmp.path(), "small", "2");
    let o = lunes(tmp.path(), &["bench", "--corpus", &corpus, "--steps", "80", "--out", "bench"]);
    assert_ok(&o);
    let dir = tmp.path().join("bench");
    let stats = fs::read_dir(&dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "stats"))
        .count();
    assert_eq!(stats, 5);
    let csv = fs::read_to_string(dir.join("speedup.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6, "{csv}");
    assert!(stdout(&o).contains("equivalence=ok"));
}

#[test]
fn precedence_flags_env_file() {
    let tmp = TempDir::new().unwrap();
    let corpus = small_corpus(tmp.path(), "small", "1");
    fs::write(tmp.path().join("run.conf"), "steps=20\nttl=2\nseed=11\n").unwrap();
    let header = |dir: &str| fs::read_to_string(traces(&tmp.path().join(dir))[0].clone()).unwrap();

    assert_ok(&lunes(tmp.path(), &["--config", "run.conf", "sim", "--corpus", &corpus, "--out", "file"]));
    let h = header("file");
    assert!(h.contains("# ttl=2\n") && h.contains("# steps=20\n") && h.contains("# seed=11\n"));

    let env = [("LUNES_TTL", "3"), ("LUNES_CONFIG", "run.conf")];
    assert_ok(&lunes_env(tmp.path(), &["sim", "--corpus", &corpus, "--out", "env"], &env));
    let h = header("env");
    assert!(h.contains("# ttl=3\n") && h.contains("# steps=20\n"));

    assert_ok(&lunes_env(tmp.path(), &["sim", "--corpus", &corpus, "--ttl", "4", "--out", "flag"], &env));
    assert!(header("flag").contains("# ttl=4\n"));

    fs::write(tmp.path().join("bad.conf"), "stepz=20\n").unwrap();
    assert_eq!(code(&lunes(tmp.path(), &["--config", "bad.conf", "sim", "--corpus", &corpus])), 2);
}

#[test]
fn help_and_unknown_command() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&lunes(tmp.path(), &["--help"])), 0);
    assert_eq!(code(&lunes(tmp.path(), &["frobnicate"])), 2);
}

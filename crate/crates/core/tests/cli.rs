use std::fs;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_partrace");
const PROGRAMS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/programs");

fn partrace(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("PARTRACE_SMT_SOLVER")
        .output()
        .unwrap()
}

fn program(name: &str) -> String {
    format!("{PROGRAMS}/{name}")
}

#[test]
fn exit_codes_follow_the_verdict() {
    let safe = partrace(&["verify", &program("notzero.imp"), "--workers", "2"]);
    assert_eq!(safe.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&safe.stdout).starts_with("SAFE"));

    let bad = partrace(&["verify", &program("notzero_bad.imp")]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("trace: "));

    let limited = partrace(&["verify", &program("notzero.imp"), "--max-refinements", "0"]);
    assert_eq!(limited.status.code(), Some(2));

    assert_eq!(partrace(&["verify", "missing.imp"]).status.code(), Some(3));
    assert_eq!(partrace(&["verify", "--no-such-flag"]).status.code(), Some(3));
    assert_eq!(partrace(&["verify", &program("notzero.imp"), "--backend", "cvc"]).status.code(), Some(3));
    assert_eq!(partrace(&["--help"]).status.code(), Some(0));
}

#[test]
fn expect_mismatch_has_its_own_code() {
    let ok = partrace(&["verify", &program("notzero.imp"), "--expect", "safe"]);
    assert_eq!(ok.status.code(), Some(0));
    let wrong = partrace(&["verify", &program("notzero.imp"), "--expect", "unsafe"]);
    assert_eq!(wrong.status.code(), Some(4));
}

#[test]
fn output_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n).to_string_lossy().into_owned();
    let out = partrace(&[
        "verify",
        &program("notzero_bad.imp"),
        "--workers",
        "1",
        "--stats-csv",
        &path("stats.csv"),
        "--event-log",
        &path("events.jsonl"),
        "--emit-witness",
        &path("witness.txt"),
    ]);
    assert_eq!(out.status.code(), Some(1));

    let csv = fs::read_to_string(path("stats.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("label,workers,verdict,wall_time,traces_checked,refinements,wasted_results,correct")
    );
    assert!(lines.next().unwrap().starts_with("notzero_bad,1,UNSAFE,"));

    let events = fs::read_to_string(path("events.jsonl")).unwrap();
    let first: serde_json::Value = serde_json::from_str(events.lines().next().unwrap()).unwrap();
    assert_eq!(first["event"], "assign");
    assert_eq!(first["trace_hash"].as_str().map(str::len), Some(16));
    assert!(events.lines().last().unwrap().contains("\"verdict\""));

    let witness = fs::read_to_string(path("witness.txt")).unwrap();
    let trace_line = witness.lines().find_map(|l| l.strip_prefix("trace: ")).unwrap();
    let trace: partrace::automata::Trace = trace_line.parse().unwrap();
    let a = partrace::lang::compile(&fs::read_to_string(program("notzero_bad.imp")).unwrap()).unwrap();
    assert!(a.accepts(&trace));
}

#[test]
fn gen_and_bench_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_string_lossy().into_owned();
    assert_eq!(partrace(&["gen", "branches", "3", "-o", &p("br3.imp")]).status.code(), Some(0));
    assert_eq!(partrace(&["gen", "loops", "2", "--bug", "-o", &p("lp2.imp")]).status.code(), Some(0));
    fs::write(p("suite.txt"), "br3.imp safe\nlp2.imp unsafe loops\n").unwrap();
    let out = partrace(&[
        "bench",
        &p("suite.txt"),
        "--workers",
        "1,2",
        "--repetitions",
        "2",
        "--stats-csv",
        &p("runs.csv"),
        "--summary-csv",
        &p("summary.csv"),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(p("runs.csv")).unwrap().lines().count(), 1 + 2 * 2 * 2);
    assert!(fs::read_to_string(p("summary.csv")).unwrap().starts_with("label,workers,median_wall_time,speedup\n"));
}

#[test]
fn backend_flag_beats_environment() {
    // The environment names a solver that does not exist; the flag wins.
    let out = Command::new(BIN)
        .args(["verify", &program("notzero.imp"), "--backend", "builtin"])
        .env("PARTRACE_SMT_SOLVER", "/nonexistent/solver")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = Command::new(BIN)
        .args(["verify", &program("notzero.imp")])
        .env("PARTRACE_SMT_SOLVER", "/nonexistent/solver")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));
}

use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::OnceLock;

use embcol::counting::{emb_count, subgraph_count};
use embcol::graphs::{PatternGraph, SimpleGraph};
use embcol::ip::Transcript;
use embcol::rng;
use jsonschema::JSONSchema;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_embcol");

fn schema() -> &'static JSONSchema {
    static SCHEMA: OnceLock<JSONSchema> = OnceLock::new();
    SCHEMA.get_or_init(|| {
        let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json")).unwrap();
        JSONSchema::compile(&serde_json::from_str(&text).unwrap()).expect("schema compiles")
    })
}

struct Run {
    code: i32,
    report: Option<Value>,
    stdout: String,
    stderr: String,
}

/// Runs the binary; any JSON report on stdout must satisfy the schema.
fn embcol(args: &[&str]) -> Run {
    let out = Command::new(BIN).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let report: Option<Value> = serde_json::from_str(&stdout).ok();
    if let Some(r) = &report {
        if let Err(errors) = schema().validate(r) {
            let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
            panic!("report of {args:?} violates the schema: {msgs:#?}");
        }
    }
    Run { code: out.status.code().unwrap_or(-1), report, stdout, stderr: String::from_utf8(out.stderr).unwrap() }
}

fn ok(args: &[&str]) -> Value {
    let run = embcol(args);
    assert_eq!(run.code, 0, "{args:?} failed: {}", run.stderr);
    run.report.expect("JSON report")
}

fn ok_owned(args: &[String]) -> Value {
    ok(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

fn write_graph(dir: &Path, name: &str, g: &SimpleGraph) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(g).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn count_brute_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng::stream(11);
    for (i, pat) in ["k22", "k12", "k3"].iter().enumerate() {
        let g = SimpleGraph::random(7, 0.6, &mut r);
        let path = write_graph(dir.path(), &format!("g{i}.json"), &g);
        let h = PatternGraph::parse(pat).unwrap();
        let rep = ok(&["count", "--pattern", pat, "--graph", &path, "--method", "brute"]);
        assert_eq!(rep["result"]["count"], emb_count(&h, &g).unwrap().to_string());
        let rep = ok(&["count", "--pattern", pat, "--graph", &path, "--method", "sub"]);
        assert_eq!(rep["result"]["count"], subgraph_count(&h, &g).unwrap().to_string());
    }
}

#[test]
fn fast_count_agrees_with_sub_count() {
    let dir = tempfile::tempdir().unwrap();
    let g = SimpleGraph::random(9, 0.5, &mut rng::stream(12));
    let path = write_graph(dir.path(), "g.json", &g);
    let fast = ok(&["count", "--pattern", "k23", "--graph", &path, "--method", "fast"]);
    let sub = ok(&["count", "--pattern", "k23", "--graph", &path, "--method", "sub"]);
    assert_eq!(fast["result"], sub["result"]);
}

#[test]
fn usage_errors_exit_two_and_name_the_flag() {
    let run = embcol(&["wta", "--trials", "1"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("--seed"), "{}", run.stderr);

    let run = embcol(&["count", "--pattern", "q7", "--graph", "x.json"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("--pattern"), "{}", run.stderr);

    let run = embcol(&["count", "--pattern", "k22", "--graph", "/nonexistent/g.json"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("--graph"), "{}", run.stderr);

    let run = embcol(&["wta", "--seed", "1", "--oracle", "sometimes"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("--oracle"), "{}", run.stderr);

    assert_eq!(embcol(&["frobnicate"]).code, 2);
    assert_eq!(embcol(&[]).code, 2);
}

#[test]
fn statistical_subcommands_require_a_seed() {
    for args in [
        &["gen", "--kind", "colored"][..],
        &["check", "--trials", "1"],
        &["select", "--trials", "1"],
        &["amplify", "--mode", "gl", "--k", "2", "--epsilon", "0.5"],
        &["verify"],
        &["reduce", "--kind", "detect-parity", "--pattern", "k3", "--graph", "-"],
    ] {
        let run = embcol(args);
        assert_eq!(run.code, 2, "{args:?}: {}", run.stderr);
        assert!(run.stderr.contains("--seed"), "{args:?}: {}", run.stderr);
    }
}

#[test]
fn gen_then_reduce_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ov = dir.path().join("ov.json");
    ok(&["gen", "--kind", "ov", "--n", "2", "--d", "4", "--block-size", "2", "--seed", "5", "--out", ov.to_str().unwrap()]);
    let rep = ok(&["reduce", "--kind", "kov", "--ov", ov.to_str().unwrap()]);
    assert_eq!(rep["result"]["agree"], true);

    let g = dir.path().join("g.json");
    ok(&["gen", "--kind", "graph", "--n", "6", "--p", "0.6", "--seed", "8", "--out", g.to_str().unwrap()]);
    for kind in ["lovasz", "hom-via-embcol"] {
        let rep = ok(&["reduce", "--kind", kind, "--pattern", "k12", "--graph", g.to_str().unwrap()]);
        assert_eq!(rep["result"]["agree"], true, "{kind}");
        assert!(rep["queries"]["oracle"].as_u64().unwrap() > 0);
    }
    let rep = ok(&["reduce", "--kind", "ka-kaa", "--a", "3", "--graph", g.to_str().unwrap()]);
    assert_eq!(rep["result"]["agree"], true);
    let rep = ok(&["reduce", "--kind", "detect-parity", "--pattern", "k3", "--graph", g.to_str().unwrap(), "--seed", "2"]);
    assert_eq!(rep["result"]["agree"], true);

    let x = dir.path().join("x.json");
    ok(&["gen", "--kind", "colored", "--pattern", "k12", "--n", "3", "--seed", "3", "--out", x.to_str().unwrap()]);
    for kind in ["embcol-via-emb", "ie-bipartite"] {
        let rep = ok(&["reduce", "--kind", kind, "--graph", x.to_str().unwrap()]);
        assert_eq!(rep["result"]["agree"], true, "{kind}");
    }
    let rep = ok(&["reduce", "--kind", "pad", "--a", "2", "--b", "2", "--graph", x.to_str().unwrap()]);
    assert_eq!(rep["result"]["agree"], true);
}

#[test]
fn honest_session_accepts_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let rep = ok(&["verify", "--pattern", "k12", "--n", "8", "--seed", "4", "--transcript", t.to_str().unwrap()]);
    assert_eq!(rep["result"]["outcome"], "accept");
    let rep = ok(&["verify", "--replay", t.to_str().unwrap()]);
    assert_eq!(rep["result"]["outcome"], "accept");
    assert_eq!(rep["result"]["consistent"], true);
}

#[test]
fn false_claim_is_rejected_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("lie.json");
    let run = embcol(&["verify", "--n", "8", "--seed", "4", "--lie", "--backend", "cheat", "--transcript", t.to_str().unwrap()]);
    assert_eq!(run.code, 1, "{}", run.stderr);
    assert_eq!(run.report.unwrap()["result"]["outcome"], "reject");
    // the stored rejection replays to the same verdict, and still exits 1
    let run = embcol(&["verify", "--replay", t.to_str().unwrap()]);
    assert_eq!(run.code, 1);
    assert_eq!(run.report.unwrap()["result"]["consistent"], true);
}

#[test]
fn stdio_and_tcp_sessions_match_in_process() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = ["local", "stdio", "tcp"].iter().map(|n| dir.path().join(format!("{n}.json"))).collect();
    let base = ["verify", "--pattern", "k12", "--n", "8", "--seed", "9", "--transcript"];
    let with = |p: &Path, extra: &[&str]| {
        let mut args: Vec<&str> = base.to_vec();
        args.push(p.to_str().unwrap());
        args.extend_from_slice(extra);
        args.iter().map(|s| s.to_string()).collect::<Vec<_>>()
    };
    ok_owned(&with(&paths[0], &[]));

    let exec = format!("{BIN} prove --stdio");
    let rep = ok_owned(&with(&paths[1], &["--exec", &exec]));
    assert_eq!(rep["params"]["transport"], "stdio");

    let mut server = Command::new(BIN)
        .args(["prove", "--listen", "127.0.0.1:0", "--sessions", "1"])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(server.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("listening on ").expect("address line").to_string();
    let rep = ok_owned(&with(&paths[2], &["--connect", &addr]));
    assert_eq!(rep["result"]["outcome"], "accept");
    let served = server.wait_with_output().unwrap();
    assert!(served.status.success());
    let prover_report: Value = serde_json::from_slice(&served.stdout).unwrap();
    assert!(schema().is_valid(&prover_report));
    assert_eq!(prover_report["result"]["accepted"], 1);

    let read = |p: &Path| Transcript::from_json(&std::fs::read_to_string(p).unwrap()).unwrap();
    let (a, b, c) = (read(&paths[0]), read(&paths[1]), read(&paths[2]));
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn dead_prover_is_a_transport_error_not_a_rejection() {
    let run = embcol(&["verify", "--n", "8", "--seed", "1", "--exec", "true"]);
    assert_eq!(run.code, 1);
    assert_eq!(run.report.unwrap()["result"]["outcome"], "transport-error");

    // nothing listens on a port we just released
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap();
    let run = embcol(&["verify", "--n", "8", "--seed", "1", "--connect", &port.to_string()]);
    assert_eq!(run.code, 1);
    assert_eq!(run.report.unwrap()["result"]["outcome"], "transport-error");
}

#[test]
fn wta_with_corrupt_oracle() {
    let rep = ok(&["wta", "--pattern", "k11", "--n", "8", "--oracle", "corrupt:0.01", "--trials", "60", "--seed", "7"]);
    let rate = rep["result"]["success_rate"].as_f64().unwrap();
    assert!(rate >= 0.66, "success rate {rate}");
    assert_eq!(rep["result"]["queries_per_decode_exact"], true);
    assert_eq!(rep["records"].as_array().unwrap().len(), 60);
}

#[test]
fn records_do_not_depend_on_jobs() {
    for args in [
        &["wta", "--n", "4", "--trials", "8", "--seed", "3"][..],
        &["check", "--pattern", "k11", "--n", "4", "--oracle", "corrupt:0.3", "--trials", "8", "--seed", "3"],
        &["amplify", "--mode", "gl", "--k", "2", "--epsilon", "0.5", "--n", "3", "--trials", "3", "--samples", "10", "--seed", "3"],
    ] {
        let one = ok(&[args, &["--jobs", "1"]].concat());
        let three = ok(&[args, &["--jobs", "3"]].concat());
        assert_eq!(one["records"], three["records"], "{args:?}");
        assert_eq!(one["summary"], three["summary"], "{args:?}");
    }
}

#[test]
fn checker_and_selector() {
    let rep = ok(&["check", "--pattern", "k12", "--n", "8", "--oracle", "exact", "--trials", "5", "--seed", "1"]);
    assert_eq!(rep["result"]["correct_rate"], 1.0);
    let rep = ok(&["check", "--pattern", "k12", "--n", "8", "--oracle", "constant", "--trials", "5", "--seed", "1"]);
    assert_eq!(rep["result"]["wrong_outputs"], 0);
    let rep = ok(&["select", "--pattern", "k11", "--n", "4", "--oracles", "constant,exact", "--trials", "4", "--seed", "2"]);
    assert_eq!(rep["result"]["correct_rate"], 1.0);
    assert!(rep["queries"]["oracle_1"].as_u64().unwrap() > 0);
}

#[test]
fn single_instance_check_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.json");
    ok(&["gen", "--kind", "colored", "--pattern", "k11", "--n", "4", "--seed", "6", "--out", x.to_str().unwrap()]);
    let run = embcol(&["check", "--graph", x.to_str().unwrap(), "--oracle", "constant", "--seed", "1"]);
    assert_eq!(run.code, 1);
    let run = embcol(&["check", "--graph", x.to_str().unwrap(), "--oracle", "exact", "--seed", "1"]);
    assert_eq!(run.code, 0);
}

#[test]
fn amplify_reports() {
    let rep = ok(&["amplify", "--mode", "gl", "--oracle", "exact", "--k", "3", "--epsilon", "0.5", "--n", "3", "--trials", "1", "--samples", "10", "--seed", "1"]);
    assert_eq!(rep["result"]["end_to_end_success"], 1.0);
    assert!(rep["result"]["queries_issued"].as_u64().unwrap() > 0);
    let rep = ok(&[
        "amplify", "--mode", "xor", "--oracle", "exact", "--k", "3", "--epsilon", "0.5", "--n", "4", "--max-queries", "255",
        "--trials", "1", "--samples", "5", "--inputs", "2", "--seed", "1",
    ]);
    assert_eq!(rep["result"]["end_to_end_success"], 1.0);
    let rep = ok(&["amplify", "--mode", "dpt", "--oracle", "exact", "--k", "4", "--epsilon", "1", "--n", "3", "--trials", "1", "--samples", "20", "--inputs", "0", "--seed", "1"]);
    assert_eq!(rep["result"]["best_candidate_success"], 1.0);
    assert!(rep["result"]["end_to_end_success"].is_null());
}

#[test]
fn csv_output_has_one_row_per_trial() {
    let run = embcol(&["wta", "--n", "4", "--trials", "3", "--seed", "1", "--csv"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let lines: Vec<&str> = run.stdout.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].split(',').any(|c| c == "correct"));
}

use std::path::{Path, PathBuf};
use std::process::{Command as Process, Output};

use netzero_cli::{run, Command, Options, Status};
use netzero_core::{block_system, invariant_zeros, match_sets, Cx, ZeroOptions};
use serde_json::Value;

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("models")
}

fn netzero(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_netzero")).args(args).output().expect("binary runs")
}

fn model(name: &str) -> String {
    models().join(name).display().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn points(v: &Value) -> Vec<Cx<f64>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|p| {
            let p = p.get("location").unwrap_or(p);
            Cx::new(p["re"].as_f64().unwrap(), p["im"].as_f64().unwrap())
        })
        .collect()
}

#[test]
fn zeros_of_the_three_agent_network() {
    let out = netzero(&["zeros", "--model", &model("three_agent.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    let zeros = &report["results"]["zeros"];
    let found = points(&zeros["finite_zeros"]);
    assert!(match_sets(&found, &[Cx::new(1.0, 0.0), Cx::new(-1.0, 0.0)], 1e-8).matched, "{found:?}");
    assert_eq!(zeros["has_infinite_zero"], Value::Bool(true));
    assert_eq!(report["status"], "ok");
}

#[test]
fn design_on_the_chain() {
    let out = netzero(&["design", "--model", &model("chain.json")]);
    assert_eq!(out.status.code(), Some(0));
    let results = &json(&out)["results"];
    assert_eq!(results["zero_free"], Value::Bool(true));
    assert_eq!(results["relative_degree"], 2);
}

#[test]
fn blocked_three_agent_network_matches_explicit_blocking() {
    let path = model("three_agent.json");
    let out = netzero(&["block", "--model", &path, "--T", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["passed"] == Value::Bool(true)));
    let reported = points(&report["results"]["blocked_nonzero"]);
    // independent route: block the network by hand and run the engine on it
    let (_, m) = netzero_cli::parse_model(Path::new(&path)).unwrap();
    let sys = netzero_core::close_loop(&m.agents, &m.coupling).unwrap().system;
    let direct = invariant_zeros(&block_system(&sys, 2).unwrap().system, &ZeroOptions::default()).unwrap();
    assert!(match_sets(&reported, &direct.nonzero_locations(), 1e-8).matched);
    assert!(match_sets(&reported, &[Cx::new(1.0, 0.0)], 1e-8).matched, "{reported:?}");
}

#[test]
fn reports_are_byte_identical_and_rerunnable() {
    let path = model("ring.json");
    let first = netzero(&["verify", "--model", &path, "--seed", "5"]);
    let second = netzero(&["verify", "--model", &path, "--seed", "5"]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, second.stdout);
    let report = json(&first);
    assert_eq!(report["seed"], 5);
    assert_eq!(report["tolerances"]["matching"], 1e-6);
    let argv: Vec<String> =
        report["command"]["argv"].as_array().unwrap().iter().map(|a| a.as_str().unwrap().to_string()).collect();
    let again = netzero(&argv[1..].iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(again.stdout, first.stdout);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let path = model("mixed.json");
    let to_file = netzero(&["zeros", "--model", &path, "--out", target.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let to_stdout = netzero(&["zeros", "--model", &path]);
    assert_eq!(std::fs::read(&target).unwrap(), to_stdout.stdout);
}

#[test]
fn digest_tracks_the_input_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("copy.json");
    let text = std::fs::read_to_string(model("chain.json")).unwrap();
    std::fs::write(&copy, format!("{text}\n")).unwrap();
    let a = json(&netzero(&["zeros", "--model", &model("chain.json")]));
    let b = json(&netzero(&["zeros", "--model", copy.to_str().unwrap()]));
    assert_ne!(a["input_digest"], b["input_digest"]);
    assert_eq!(a["results"], b["results"]);
}

#[test]
fn violated_hypothesis_exits_one_with_a_report() {
    let out = netzero(&["circulant", "--model", &model("three_agent.json")]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["status"], "hypothesis_violation");
    assert!(report["violation"]["hypothesis"].as_str().unwrap().contains("circulant"));
    let design = netzero(&["design", "--model", &model("ring.json")]);
    assert_eq!(design.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&design.stderr).contains("D = 0"));
}

#[test]
fn failed_check_exits_one() {
    // a matching tolerance below rounding error turns agreement into a finding
    let out = netzero(&["homog", "--model", &model("ring.json"), "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "finding");
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(netzero(&["zeros", "--model", missing.to_str().unwrap()]).status.code(), Some(2));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\n  \"coupling\": {\n").unwrap();
    let out = netzero(&["zeros", "--model", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.json:3"), "{}", String::from_utf8_lossy(&out.stderr));

    let misshaped = dir.path().join("misshaped.json");
    let text = std::fs::read_to_string(model("three_agent.json")).unwrap();
    std::fs::write(&misshaped, text.replace("[[1, 1, 0], [1, 0, 1], [0, 1, 1]]", "[[1, 1, 0], [1, 0, 1]]")).unwrap();
    let out = netzero(&["zeros", "--model", misshaped.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coupling.L"));

    let unwritable = dir.path().join("no-such-dir").join("report.json");
    let out = netzero(&["zeros", "--model", &model("chain.json"), "--out", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(netzero(&["block", "--model", &model("chain.json"), "--T", "0"]).status.code(), Some(2));
    assert_eq!(netzero(&["spin", "--model", &model("chain.json")]).status.code(), Some(2));
}

#[test]
fn library_entry_point_matches_the_binary() {
    let path = model("three_agent.json");
    let report = run(&Options::new(Command::Homog, &path)).unwrap();
    assert_eq!(report.status, Status::Ok);
    let out = netzero(&["homog", "--model", &path]);
    assert_eq!(report.to_json().as_bytes(), out.stdout.as_slice());
}

#[test]
fn verify_runs_every_applicable_check() {
    for name in ["three_agent.json", "chain.json", "ring.json", "mixed.json"] {
        let out = netzero(&["verify", "--model", &model(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let report = json(&out);
        assert!(report["checks"].as_array().unwrap().len() >= 6, "{name}");
    }
    let mixed = json(&netzero(&["verify", "--model", &model("mixed.json")]));
    let skipped = mixed["results"]["skipped"].as_array().unwrap();
    assert!(skipped.iter().any(|s| s.as_str().unwrap().starts_with("homogeneous path")));
}

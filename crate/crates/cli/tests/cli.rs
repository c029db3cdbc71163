use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mmot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmot"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn four_cycle_is_positive() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c4.txt", "m=4\n1 2\n2 3\n3 4\n4 1\n");
    let out = mmot(&["classify", &g, "--ac", "1,4", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "MongeUnique");
    assert_eq!(v["required_ac"], serde_json::json!([1, 4]));
    let matched: Vec<&str> = v["matched_rules"].as_array().unwrap().iter().map(|r| r.as_str().unwrap()).collect();
    assert!(matched.contains(&"Thm3.1-ii"), "{matched:?}");
}

#[test]
fn disjoint_edges_are_negative() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", "m=4\n1 2\n3 4\n");
    let out = mmot(&["classify", &g, "--json"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["rule"], "Prop2.1-1");
}

#[test]
fn unknown_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c4.txt", "m=4\n1 2\n2 3\n3 4\n4 1\n");
    let out = mmot(&["classify", &g, "--profile", "ac=1"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("would apply if"));
}

#[test]
fn self_loop_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "bad.txt", "m=2\n1 1\n");
    let out = mmot(&["classify", &g]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("column"), "{err}");
}

#[test]
fn json_graph_input() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", r#"{"m":3,"edges":[[1,2],[2,3],[1,3]]}"#);
    let out = mmot(&["classify", &g, "--ac", "1", "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["rule"], "Thm3.1-i");
}

fn monotone_bundle(dir: &Path) {
    write(dir, "graph.txt", "m=2\n1 2\n");
    write(dir, "marginal_1.txt", "d=1\n1/2 0\n1/2 1\n");
    write(dir, "marginal_2.txt", "d=1\n1/2 0\n1/2 1\n");
}

#[test]
fn solve_writes_results_into_the_bundle() {
    let dir = tempfile::tempdir().unwrap();
    monotone_bundle(dir.path());
    let out = mmot(&["solve", dir.path().to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["value"], "1/2");
    assert_eq!(v["monge"]["is_monge"], true);
    for f in ["coupling.txt", "duals_1.txt", "duals_2.txt", "value.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert_eq!(fs::read_to_string(dir.path().join("value.txt")).unwrap().trim(), "1/2");
}

#[test]
fn solve_reports_non_uniqueness() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "graph.txt", "m=3\n2 3\n");
    write(dir.path(), "marginal_1.txt", "d=1\n1/3 0\n2/3 1\n");
    write(dir.path(), "marginal_2.txt", "d=1\n1/2 0\n1/2 2\n");
    write(dir.path(), "marginal_3.txt", "d=1\n1 5\n");
    let out = mmot(&["solve", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("non-unique"));
}

#[test]
fn solve_missing_marginal_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    monotone_bundle(dir.path());
    fs::remove_file(dir.path().join("marginal_2.txt")).unwrap();
    let out = mmot(&["solve", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn var_cap_exceeded_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    monotone_bundle(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_mmot"))
        .args(["solve", dir.path().to_str().unwrap()])
        .env("MMOT_VAR_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 4);
}

#[test]
fn star_experiment_passes() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "star.txt", "m=7\n1 2\n1 3\n1 4\n1 5\n1 6\n1 7\n");
    let report = dir.path().join("out").join("report.json");
    let out = mmot(&[
        "experiment",
        &g,
        "--ac",
        "1",
        "--trials",
        "50",
        "--n",
        "3",
        "--d",
        "2",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v["monge_rate"].as_f64().unwrap() >= 0.95);
    assert_eq!(v["violations"], serde_json::json!([]));
}

#[test]
fn disconnected_experiment_confirms_negative() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", "m=4\n1 2\n3 4\n");
    let out = mmot(&["experiment", &g, "--ac", "1,2,3,4", "--trials", "10", "--n", "3", "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["unique_rate"], 0.0);
}

#[test]
fn zero_trials() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c4.txt", "m=4\n1 2\n2 3\n3 4\n4 1\n");
    let out = mmot(&["experiment", &g, "--ac", "1,4", "--trials", "0", "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["trials"], 0);
}

#[test]
fn experiment_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c4.txt", "m=4\n1 2\n2 3\n3 4\n4 1\n");
    let run = || {
        let mut v = json(&mmot(&["experiment", &g, "--ac", "1,4", "--trials", "8", "--n", "3", "--seed", "4", "--json"]));
        v["mean_solve_ms"] = serde_json::Value::Null;
        v.to_string()
    };
    assert_eq!(run(), run());
}

#[test]
fn gallery_matches() {
    let out = mmot(&["gallery", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["mismatches"], 0);
    let row = |name: &str| {
        v["rows"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["name"] == name)
            .cloned()
            .unwrap()
    };
    assert_eq!(row("cocktail-party-12")["rule"], "Cor3.2");
    assert_eq!(row("fan-2-5")["verdict"], "Unknown");
    assert_eq!(row("fan-2-5")["rule"], "Prop6.1");
    let c7 = row("C7-complete");
    assert_eq!(c7["required_ac"], serde_json::json!([1]));
    assert!(c7["matched_rules"].as_array().unwrap().contains(&serde_json::json!("Thm4.1")));
}

#[test]
fn gallery_table() {
    let out = mmot(&["gallery"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("mismatches: 0"));
}

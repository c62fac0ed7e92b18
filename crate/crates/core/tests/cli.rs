use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arithstruct")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn temp_file(name: &str, body: &str) -> String {
    let path = std::env::temp_dir().join(format!("arithstruct-{}-{name}", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn verify_example_structure() {
    let out = run(&["verify", "--graph", &data("figure1_graph.json"), "--structure", &data("figure1_structure.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verified"], true);
    assert_eq!(v["d"], serde_json::json!([2, 5, 3, 2, 4, 2, 2]));
    assert_eq!(v["residuals"], serde_json::json!([0, 0, 0, 0, 0, 0, 0]));
}

#[test]
fn verify_reports_failures() {
    let bad = temp_file("bad.json", r#"{"r": [1, 2, 1, 1, 1, 1, 1], "d": [2, 2, 2, 2, 2, 2, 2]}"#);
    let out = run(&["verify", "--graph", &data("figure1_graph.json"), "--structure", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verified"], false);
    assert_eq!(v["failing_vertices"], serde_json::json!([1, 2, 3, 4, 5]));
}

#[test]
fn verify_recovers_d() {
    let ones = temp_file("ones.json", r#"{"r": [1, 1, 1, 1, 1, 1, 1]}"#);
    let out = run(&["verify", "--graph", &data("figure1_graph.json"), "--structure", &ones]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["d"], serde_json::json!([3, 3, 2, 3, 3, 2, 2]));

    let stuck = temp_file("stuck.json", r#"{"r": [2, 3, 3]}"#);
    let path3 = temp_file("p3.json", r#"{"n": 3, "edges": [[1, 2, 1], [2, 3, 1]]}"#);
    assert_eq!(run(&["verify", "--graph", &path3, "--structure", &stuck]).status.code(), Some(1));
}

#[test]
fn malformed_input_exits_2() {
    let broken = temp_file("broken.json", r#"{"r": "#);
    let out = run(&["verify", "--graph", &data("figure1_graph.json"), "--structure", &broken]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    assert_eq!(run(&["enumerate", "--graph", "/nonexistent/graph.json"]).status.code(), Some(2));
    assert_eq!(run(&["bounds", "--n", "1", "--edges", "3"]).status.code(), Some(2));
}

#[test]
fn reduce_complete_graph_chain() {
    let out = run(&[
        "reduce",
        "--graph",
        &data("k4_graph.json"),
        "--structure",
        &data("k4_structure.json"),
        "--vertex",
        "1",
        "--vertex",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let steps = json(&out);
    let steps = steps.as_array().unwrap();
    assert_eq!(steps.len(), 2);
    assert_eq!(steps[0]["s"], 1);
    assert_eq!(steps[0]["structure"]["r"], serde_json::json!([3, 2, 1]));
    assert_eq!(steps[0]["structure"]["d"], serde_json::json!([2, 4, 10]));
    assert_eq!(steps[1]["s"], 2);
    assert_eq!(steps[1]["graph"]["edges"], serde_json::json!([[1, 2, 8]]));
    assert_eq!(steps[1]["structure"]["d"], serde_json::json!([4, 16]));
}

#[test]
fn reduce_example_graph() {
    let out = run(&[
        "reduce",
        "--graph",
        &data("figure1_graph.json"),
        "--structure",
        &data("figure1_structure.json"),
        "--vertex",
        "1",
    ]);
    let steps = json(&out);
    let want: Value = serde_json::from_str(&std::fs::read_to_string(data("figure2_graph.json")).unwrap()).unwrap();
    assert_eq!(steps[0]["graph"], want);
    assert_eq!(steps[0]["structure"]["r"], serde_json::json!([1, 1, 2, 1, 1, 1]));
}

#[test]
fn enumerate_paths_and_formats() {
    let p4 = temp_file("p4.json", r#"{"n": 4, "edges": [[1, 2, 1], [2, 3, 1], [3, 4, 1]]}"#);
    let v = json(&run(&["enumerate", "--graph", &p4, "--method", "brute", "--r-max", "16"]));
    assert_eq!(v["count"], 5);
    assert_eq!(v["complete"], true);
    assert_eq!(v["structures"][0]["r"], serde_json::json!([1, 1, 1, 1]));

    let plain = run(&["enumerate", "--graph", &p4, "--format", "plain"]);
    let text = String::from_utf8(plain.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("r=(1,1,1,1) d=(1,2,2,1)"));
    assert!(text.trim_end().ends_with("count 5 (recursive, complete: true)"));

    let agree = json(&run(&["enumerate", "--graph", &p4, "--check-agree"]));
    assert_eq!(agree["agree"], true);
}

#[test]
fn short_brute_range_warns() {
    let out = run(&["enumerate", "--family", "mkn", "--n", "3", "--m", "1", "--method", "brute", "--r-max", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["complete"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("IncompleteWarning"));
}

#[test]
fn enumeration_is_deterministic() {
    let args = ["enumerate", "--family", "mkn", "--n", "4", "--m", "3", "--threads", "2"];
    let a = json(&run(&args));
    let b = json(&run(&args));
    assert_eq!(a["count"], 339);
    assert_eq!(a["structures"], b["structures"]);
}

#[test]
fn egyptian_listing() {
    let out = run(&["egyptian", "--n", "3", "--m", "1"]);
    let lines: Vec<Value> =
        String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let xs: Vec<&Value> = lines.iter().map(|v| &v["x"]).collect();
    assert_eq!(xs, [&serde_json::json!([2, 3, 6]), &serde_json::json!([2, 4, 4]), &serde_json::json!([3, 3, 3])]);
    let count = run(&["egyptian", "--n", "3", "--m", "101", "--count-only"]);
    assert_eq!(String::from_utf8(count.stdout).unwrap().trim(), "164");
}

#[test]
fn bounds_report() {
    let v = json(&run(&["bounds", "--n", "4", "--m", "2"]));
    assert_eq!(v["mkn_bound"], "23028");
    assert_eq!(v["edge_count"], "12");
    assert_eq!(v["boundary_flag"], false);
    let v = json(&run(&["bounds", "--n", "2", "--edges", "3"]));
    assert_eq!(v["general_bound"], "19");
    let env = Command::new(env!("CARGO_BIN_EXE_arithstruct"))
        .args(["bounds", "--n", "3", "--m", "7"])
        .env("ARITHSTRUCT_PRECISION_BITS", "256")
        .output()
        .unwrap();
    let v = json(&env);
    assert_eq!(v["precision_bits"], 256);
    assert_eq!(v["mkn_bound"], "720");
}

#[test]
fn table_matches_golden_file() {
    let out = run(&[
        "table", "--n-list", "3,4,5", "--m-max", "10", "--m-extra", "100,101", "--limit", "4=10", "--limit", "5=1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let golden = std::fs::read_to_string(data("table1.csv")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);

    let egy = run(&["table", "--n-list", "3", "--m-max", "4", "--method", "egyptian"]);
    assert_eq!(String::from_utf8(egy.stdout).unwrap(), "m,count_n3,bound_n3\n1,3,20\n2,10,56\n3,21,127\n4,28,229\n");
    let empty = run(&["table", "--n-list", "3", "--m-max", "0"]);
    assert_eq!(String::from_utf8(empty.stdout).unwrap(), "m,count_n3,bound_n3\n");
}

#[test]
fn crosscheck_small_range() {
    let out = run(&["crosscheck", "--n-list", "3", "--m-max", "3", "--brute"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,m,recursive,egyptian,brute,bound,status");
    assert_eq!(rows[1..], ["3,1,3,3,3,20,ok", "3,2,10,10,10,56,ok", "3,3,21,21,21,127,ok"]);
}

//! End-to-end tests driving the compiled binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polygon-sandpile"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn group_json_for_the_four_spoke_wheel() {
    let out = run(&[
        "group", "--ring", "-n", "4", "-a", "1", "-b", "0", "--format", "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["invariant_factors"], serde_json::json!(["3", "15"]));
    assert_eq!(value["order"], "45");
    assert_eq!(value["spec"]["topology"], "ring");
    assert_eq!(value["spec"]["n"], 4);
    assert_eq!(value["method"], "closed");
}

#[test]
fn group_of_the_twisted_three_ring() {
    let out = run(&["group", "--twisted", "-n", "3", "-a", "1", "-b", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("Z_3 (+) Z_3 (+) Z_9"), "{text}");
    assert!(text.contains("order: 81"), "{text}");
}

#[test]
fn group_of_the_banana() {
    let out = run(&[
        "group", "--ring", "-n", "2", "-a", "0", "-b", "0", "--format", "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["invariant_factors"], serde_json::json!(["2"]));
}

#[test]
fn group_accepts_topology_flag_and_lists() {
    let out = run(&[
        "group",
        "--topology",
        "ring",
        "--a-list",
        "1,2,1",
        "--b-list",
        "1,1,2",
        "--verify",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["cross_checked"], true);
    assert_eq!(value["spec"]["a"], serde_json::json!([1, 2, 1]));
}

#[test]
fn trees_of_the_prism() {
    let out = run(&["trees", "--ring", "-n", "3", "-a", "1", "-b", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("spanning trees: 75"));
}

#[test]
fn matrix_uniform_form_is_the_printed_one() {
    let out = run(&[
        "matrix", "--ring", "-n", "2", "-a", "1", "-b", "1", "--format", "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["form"], "uniform");
    assert_eq!(
        value["rows"],
        serde_json::json!([["1", "4", "1"], ["2", "2", "2"], ["2", "1", "0"]])
    );
    assert_eq!(value["determinant"], "12");
}

#[test]
fn matrix_general_form_for_non_uniform_rings() {
    let out = run(&[
        "matrix",
        "--twisted",
        "--a-list",
        "1,2,1",
        "--b-list",
        "1,1,2",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["form"], "general");
    assert_eq!(value["rows"].as_array().unwrap().len(), 3);
    // Its absolute determinant is the spanning-tree count.
    let trees = run(&[
        "trees", "--twisted", "--a-list", "1,2,1", "--b-list", "1,1,2", "--format", "json",
    ]);
    let trees_value: serde_json::Value = serde_json::from_str(&stdout(&trees)).unwrap();
    let det: i64 = value["determinant"].as_str().unwrap().parse().unwrap();
    let count: i64 = trees_value["count"].as_str().unwrap().parse().unwrap();
    assert_eq!(det.abs(), count);
}

#[test]
fn compare_agrees_on_the_twisted_two_ring() {
    let out = run(&["compare", "--twisted", "-n", "2", "-a", "1", "-b", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("agree: order 16, factors [4, 4]"), "{text}");
}

#[test]
fn simulate_counts_recurrent_configurations() {
    let out = run(&[
        "simulate",
        "--ring",
        "-n",
        "3",
        "-a",
        "1",
        "-b",
        "0",
        "--recurrent",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("recurrent configurations: 16"), "{text}");
    assert!(text.contains("match: yes"), "{text}");
}

#[test]
fn simulate_stabilizes_a_pile() {
    let out = run(&[
        "simulate",
        "--ring",
        "-n",
        "2",
        "-a",
        "1",
        "-b",
        "1",
        "--heights",
        "0,9,0,0",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(value["total_topples"].as_u64().unwrap() > 0);
    // The graph description rides along: 4 vertices, 6 labeled oriented edges.
    assert_eq!(value["graph"]["vertices"].as_array().unwrap().len(), 4);
    assert_eq!(value["graph"]["edges"].as_array().unwrap().len(), 6);
    assert_eq!(value["graph"]["edges"][0]["label"], "e1");
    // Seeded runs give the identical stable configuration.
    let seeded = run(&[
        "simulate",
        "--ring",
        "-n",
        "2",
        "-a",
        "1",
        "-b",
        "1",
        "--heights",
        "0,9,0,0",
        "--seed",
        "7",
        "--format",
        "json",
    ]);
    let seeded_value: serde_json::Value = serde_json::from_str(&stdout(&seeded)).unwrap();
    assert_eq!(value["stable"], seeded_value["stable"]);
}

#[test]
fn sweep_reports_zero_disagreements() {
    let out = run(&[
        "sweep",
        "--n",
        "2..4",
        "--a",
        "0..2",
        "--b",
        "0..2",
        "--topologies",
        "ring,twisted",
    ]);
    assert!(out.status.success());
    let summary = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(summary.contains("disagreements: 0"), "{summary}");
    let body = stdout(&out);
    assert!(body.starts_with("n,a,b,topology,method,order,factors,runtime_ms"));
    // 3 * 9 * 2 instances, at least laplacian + edge rows each.
    assert!(body.lines().count() > 54);
}

#[test]
fn json_output_round_trips_and_is_deterministic() {
    let args = [
        "group",
        "--twisted",
        "-n",
        "4",
        "-a",
        "2",
        "-b",
        "2",
        "--format",
        "json",
    ];
    let first = stdout(&run(&args));
    let second = stdout(&run(&args));
    assert_eq!(first, second);
    let parsed: serde_json::Value = serde_json::from_str(&first).unwrap();
    let reprinted = serde_json::to_string(&parsed).unwrap();
    let reparsed: serde_json::Value = serde_json::from_str(&reprinted).unwrap();
    assert_eq!(parsed, reparsed);
}

#[test]
fn usage_errors_exit_with_code_two() {
    // Missing topology.
    let out = run(&["group", "-n", "4", "-a", "1", "-b", "0"]);
    assert_eq!(out.status.code(), Some(2));
    // Contradictory -n against the lists.
    let out = run(&[
        "group", "--ring", "-n", "5", "--a-list", "1,1", "--b-list", "0,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Ring with a single polygon.
    let out = run(&["group", "--ring", "-n", "1", "-a", "1", "-b", "1"]);
    assert_eq!(out.status.code(), Some(2));
    // Unknown subcommand is clap's usage error.
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unsupported_method_names_the_fallback() {
    let out = run(&[
        "group",
        "--twisted",
        "-n",
        "3",
        "-a",
        "2",
        "-b",
        "1",
        "--method",
        "closed",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("fall back"), "{err}");
}

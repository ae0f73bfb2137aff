use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn tci() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tci"))
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples").join(name)
}

fn run(args: &[&str]) -> Output {
    tci().args(args).output().expect("tci runs")
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = tci()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("tci runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn components_on_two_points_counts_two() {
    let out = run(&["components", example("segment_components.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["verdict"], "components");
    assert_eq!(r["n"], "2");
    assert_eq!(r["j0"], serde_json::json!([1]));
}

#[test]
fn parallel_segments_violate_with_the_pair() {
    let out = run(&["khovanskii", example("parallel_segments.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["khovanskii"]["satisfied"], false);
    assert_eq!(r["khovanskii"]["witness"], serde_json::json!([1, 2]));
    assert_eq!(r["defects"].as_array().unwrap().len(), 3);
}

#[test]
fn two_triangles_are_certified_and_the_certificate_round_trips() {
    let problem = example("two_triangles_eci.json");
    let out = run(&["eci-check", problem.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    assert_eq!(r["verdict"], "irreducible");
    let cert = &r["characteristics"][0]["certificate"];
    assert_eq!(cert["entries"][0]["deltas"].as_array().unwrap().len(), 2);

    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    std::fs::write(&report, &out.stdout).unwrap();
    let check = run(&["eci-check", problem.to_str().unwrap(), "--verify-certificate", report.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&check.stdout).contains("certificate valid"));

    // a tampered delta no longer verifies
    let mut tampered = r.clone();
    tampered["characteristics"][0]["certificate"]["entries"][0]["deltas"][1] = serde_json::json!([3]);
    tampered["characteristics"][0]["certificate"]["entries"][0]["delta_points"][1] = serde_json::json!([[1, 0, 0]]);
    std::fs::write(&report, serde_json::to_vec(&tampered).unwrap()).unwrap();
    let check = run(&["eci-check", problem.to_str().unwrap(), "--verify-certificate", report.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(1));
}

#[test]
fn critical_locus_reports_dropped_rows_per_characteristic() {
    let problem = example("tower_critical_locus.json");
    let out = run(&["critical-locus", problem.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = json(&out);
    let subs = r["characteristics"].as_array().unwrap();
    assert_eq!(subs[0]["kept_rows"], serde_json::json!([0, 1, 2]));
    assert_eq!(subs[1]["kept_rows"], serde_json::json!([0, 1]));
    assert!(subs.iter().all(|s| s["verdict"] == "irreducible"));

    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    std::fs::write(&report, &out.stdout).unwrap();
    let check = run(&["critical-locus", problem.to_str().unwrap(), "--verify-certificate", report.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0));
}

#[test]
fn reports_are_byte_stable_apart_from_wall_time() {
    let problem = example("tower_critical_locus.json");
    let strip = |out: &Output| {
        let mut v = json(out);
        v.as_object_mut().unwrap().remove("wall_time_ms");
        serde_json::to_vec(&v).unwrap()
    };
    let a = run(&["run", problem.to_str().unwrap(), "--seed", "9"]);
    let b = run(&["run", problem.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(json(&a)["stability_hash"], json(&b)["stability_hash"]);
    let c = run(&["run", problem.to_str().unwrap(), "--seed", "10"]);
    assert_ne!(json(&a)["stability_hash"], json(&c)["stability_hash"]);
}

#[test]
fn oracle_agrees_with_bkk_and_is_seeded() {
    let problem = example("mixed_volume_2d.json");
    let a = run(&["oracle", problem.to_str().unwrap(), "--oracle-trials", "30", "--seed", "4"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let r = json(&a);
    assert_eq!(r["oracle"]["bkk"], "3");
    assert_eq!(r["oracle"]["method"], "resultant");
    assert!(r["oracle"]["agreement"].as_f64().unwrap() >= 0.9);
    let b = run(&["oracle", problem.to_str().unwrap(), "--oracle-trials", "30", "--seed", "4"]);
    assert_eq!(r["oracle"]["counts"], json(&b)["oracle"]["counts"]);
}

#[test]
fn mvol_reads_standard_input() {
    let out = run_stdin(&["mvol", "-"], r#"{"ambient_rank": 2, "supports": [[[0,0],[1,0],[0,1]], [[0,0],[2,0],[0,2]]]}"#);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["mixed_volume"], "2");
}

#[test]
fn text_output_is_human_readable() {
    let out = run(&["run", example("segment_components.json").to_str().unwrap(), "--text"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("components: 2"));
    assert!(text.contains("J0: {1}"));
}

#[test]
fn exhausted_budget_exits_inconclusive() {
    let out = run(&["eci-check", example("two_triangles_eci.json").to_str().unwrap(), "--max-states", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["verdict"], "inconclusive");
    assert_eq!(r["characteristics"][0]["reason"], "search budget exhausted");
}

#[test]
fn char_flag_overrides_the_file() {
    let out = run(&["eci-check", example("two_triangles_eci.json").to_str().unwrap(), "--char", "3", "--char", "5"]);
    let r = json(&out);
    let chars: Vec<u64> = r["characteristics"].as_array().unwrap().iter().map(|c| c["characteristic"].as_u64().unwrap()).collect();
    assert_eq!(chars, vec![3, 5]);
    let bad = run(&["eci-check", example("two_triangles_eci.json").to_str().unwrap(), "--char", "4"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn schema_violations_name_a_json_pointer() {
    let cases = [
        (r#"{"ambient_rank": 2, "supports": [[[0,0],[1,0.5]]]}"#, "/supports/0/1/1"),
        (r#"{"ambient_rank": 2, "supports": [[[0,0],[1]]]}"#, "/supports/0/1"),
        (r#"{"ambient_rank": 2, "supports": [[]]}"#, "/supports/0"),
        (r#"{"ambient_rank": 1, "supports": [[[0]]], "colour": 1}"#, "/colour"),
        (r#"{"ambient_rank": 1, "supports": [[[0],[1]]], "characteristics": [4]}"#, "/characteristics/0"),
        (
            r#"{"ambient_rank": 1, "supports": [[[0],[1]]], "eci": [{"support_index": 0, "rows": [["1/0", 1]]}]}"#,
            "/eci/0/rows/0/0",
        ),
        (
            r#"{"ambient_rank": 1, "supports": [[[0],[1]]], "eci": [{"support_index": 0, "rows": [[1]]}]}"#,
            "/eci/0/rows/0",
        ),
        (r#"{"ambient_rank": 1, "supports": [[[0],[1]]], "pattern": {"kind": "tower", "x": 1, "r": 1}}"#, "/pattern/x"),
        (r#"{"ambient_rank": 1, "supports": [[[0],[1]]], "task": "guess"}"#, "/task"),
    ];
    for (input, pointer) in cases {
        let out = run_stdin(&["run", "-"], input);
        assert_eq!(out.status.code(), Some(1), "{input}");
        assert!(stderr(&out).contains(&format!("at {pointer}:")), "{input}: {}", stderr(&out));
    }
}

#[test]
fn scalar_denominators_are_checked_per_characteristic() {
    let input = r#"{"ambient_rank": 2, "characteristics": [0, 3],
        "supports": [[[0,0],[1,0],[0,1]]],
        "eci": [{"support_index": 0, "rows": [["1/3", 1, 1]]}], "task": "eci-check"}"#;
    let out = run_stdin(&["run", "-"], input);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/eci/0/rows/0/0"));
}

#[test]
fn rows_follow_the_points_as_written() {
    // the same system written in two point orders
    let a = r#"{"ambient_rank": 2, "supports": [[[0,0],[1,0],[0,1]]],
        "eci": [{"support_index": 0, "rows": [[1, 1, 1], [0, 1, 0]]}], "task": "eci-check"}"#;
    let b = r#"{"ambient_rank": 2, "supports": [[[1,0],[0,1],[0,0]]],
        "eci": [{"support_index": 0, "rows": [[1, 1, 1], [1, 0, 0]]}], "task": "eci-check"}"#;
    let ra = json(&run_stdin(&["run", "-"], a));
    let rb = json(&run_stdin(&["run", "-"], b));
    assert_eq!(ra["verdict"], rb["verdict"]);
    assert_eq!(ra["characteristics"][0]["certificate"], rb["characteristics"][0]["certificate"]);
}

#[test]
fn missing_task_and_unreadable_file_are_usage_errors() {
    let out = run_stdin(&["run", "-"], r#"{"ambient_rank": 1, "supports": [[[0],[1]]]}"#);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["run", "/nonexistent/problem.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn reports_only_use_documented_properties() {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json")).unwrap())
            .unwrap();
    let props = schema["properties"].as_object().unwrap();
    for (task, file) in [
        ("components", "segment_components.json"),
        ("khovanskii", "parallel_segments.json"),
        ("eci-check", "two_triangles_eci.json"),
        ("critical-locus", "tower_critical_locus.json"),
        ("mvol", "mixed_volume_2d.json"),
        ("oracle", "mixed_volume_2d.json"),
    ] {
        let r = json(&run(&[task, example(file).to_str().unwrap()]));
        let obj = r.as_object().unwrap();
        for key in obj.keys() {
            assert!(props.contains_key(key), "{task}: undocumented property {key}");
        }
        for key in schema["required"].as_array().unwrap() {
            assert!(obj.contains_key(key.as_str().unwrap()), "{task}: missing {key}");
        }
        assert_eq!(r["task"], task);
    }
}
